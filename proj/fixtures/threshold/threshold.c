#include <stdio.h>

double data[6] = {0.5, 2.0, 1.5, 3.25, 0.75, 4.0};

int above(double *v, int n, double cut) {
  int hits = 0;
  for (int i = 0; i < n; i++)
    if (v[i] > cut) hits++;
  return hits;
}

int main() {
  printf("above: %d\n", above(data, 6, 10.0));
  return 0;
}
