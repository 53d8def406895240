#include "croc.h"

static uint32_t fib(uint32_t n) { return n < 2 ? n : fib(n - 1) + fib(n - 2); }

static int is_prime(uint32_t n) {
  if (n < 2) return 0;
  for (uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return 0;
  return 1;
}

int main(void) {
  uart_puts("Hello from C firmware!\n");
  uart_puts("fib(15)=");
  uart_putu(fib(15));
  uart_puts("\nprimes:");
  for (uint32_t n = 0; n < 40; ++n)
    if (is_prime(n)) {
      uart_putc(' ');
      uart_putu(n);
    }
  uart_putc('\n');
  uart_flush();
  return 0;
}
