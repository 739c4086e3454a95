#include <math.h>
#include <stdio.h>

#define N 16

void matvec(double *y, double *x, int n) {
  for (int i = 0; i < n; i++) {
    double s = 4.0 * x[i];
    if (i > 0) s -= x[i - 1];
    if (i < n - 1) s -= x[i + 1];
    y[i] = s;
  }
}

double dot(double *a, double *b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; i++) s += a[i] * b[i];
  return s;
}

int main() {
  double x[N], r[N], p[N], ap[N], b[N];
  for (int i = 0; i < N; i++) {
    b[i] = 1.0 + (i % 3);
    x[i] = 0.0;
    r[i] = b[i];
    p[i] = b[i];
  }
  double rr = dot(r, r, N);
  double norm0 = sqrt(rr);
  int iter = 0;
  while (iter < 100) {
    matvec(ap, p, N);
    double alpha = rr / dot(p, ap, N);
    for (int i = 0; i < N; i++) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    double rr_new = dot(r, r, N);
    iter++;
    printf("iter %d residual %e\n", iter, sqrt(rr_new) / norm0);
    if (sqrt(rr_new) / norm0 < 1e-10) {
      rr = rr_new;
      break;
    }
    double beta = rr_new / rr;
    rr = rr_new;
    for (int i = 0; i < N; i++) p[i] = r[i] + beta * p[i];
  }
  printf("Iterations = %d\n", iter);
  printf("final residual: %e\n", sqrt(rr) / norm0);
  return 0;
}
