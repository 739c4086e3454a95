#include <stdio.h>

int table[8] = {3, 1, 4, 1, 5, 9, 2, 6};

int lookup(int slot) {
  int k = slot % 8;
  return table[k];
}

int main() {
  int sum = 0;
  for (int i = 0; i < 4; i++) sum += lookup(i * 3);
  printf("sum = %d\n", sum);
  return 0;
}
