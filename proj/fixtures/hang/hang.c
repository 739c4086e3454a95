#include <stdio.h>

double stop = 5.0;

int count(double limit) {
  int steps = 0;
  double end = limit;
  for (double x = 0.0; x != end; x += 1.0) steps++;
  return steps;
}

int main() {
  printf("steps = %d\n", count(stop));
  return 0;
}
