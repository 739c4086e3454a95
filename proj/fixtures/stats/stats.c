#include <stdio.h>
#include <stdlib.h>

struct summary {
  int count;
  double mean;
  double max;
};

void summarize(struct summary *s, double *v, int n) {
  double total = 0.0;
  s->max = v[0];
  for (int i = 0; i < n; i++) {
    total += v[i];
    if (v[i] > s->max) s->max = v[i];
  }
  s->count = n;
  s->mean = total / n;
}

int main() {
  int n = 10;
  double *v = malloc(n * sizeof(double));
  for (int i = 0; i < n; i++) v[i] = (i * 7 % 10) * 0.5;
  struct summary s;
  summarize(&s, v, n);
  FILE *f = fopen("result.txt", "w");
  fprintf(f, "count %d\nmean %f\nmax %f\n", s.count, s.mean, s.max);
  fclose(f);
  printf("done %d\n", s.count);
  free(v);
  return 0;
}
