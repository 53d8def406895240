#include "croc.h"

static volatile uint32_t ticks;

static void schedule(uint32_t delta) {
  uint64_t now = ((uint64_t)TIMER_MTIME_HI << 32) | TIMER_MTIME_LO;
  uint64_t next = now + delta;
  TIMER_CMP_HI = 0xFFFFFFFFu;
  TIMER_CMP_LO = (uint32_t)next;
  TIMER_CMP_HI = (uint32_t)(next >> 32);
}

__attribute__((interrupt("machine"))) void trap_handler(void) {
  ++ticks;
  GPIO_OUT = ticks;
  schedule(2000);
}

int main(void) {
  GPIO_DIR = 0xFF;
  __asm__ volatile("csrw mtvec, %0" ::"r"(&trap_handler));
  schedule(2000);
  __asm__ volatile("csrs mie, %0" ::"r"(1u << 7));
  __asm__ volatile("csrs mstatus, %0" ::"r"(1u << 3));
  while (ticks < 5) __asm__ volatile("wfi");
  __asm__ volatile("csrc mstatus, %0" ::"r"(1u << 3));
  uart_puts("ticks=");
  uart_putu(ticks);
  uart_putc('\n');
  uart_flush();
  return 0;
}
