#pragma once
#include <stdint.h>

#define REG32(addr) (*(volatile uint32_t *)(addr))

#define UART_BASE 0x03001000u
#define UART_TXDATA REG32(UART_BASE + 0x00)
#define UART_RXDATA REG32(UART_BASE + 0x04)
#define UART_STATUS REG32(UART_BASE + 0x08)
#define UART_TX_EMPTY (1u << 0)
#define UART_TX_FULL (1u << 1)
#define UART_RX_AVAIL (1u << 2)
#define UART_TX_BUSY (1u << 7)

#define GPIO_BASE 0x03002000u
#define GPIO_DIR REG32(GPIO_BASE + 0x00)
#define GPIO_OUT REG32(GPIO_BASE + 0x04)
#define GPIO_IN REG32(GPIO_BASE + 0x08)

#define TIMER_BASE 0x03003000u
#define TIMER_MTIME_LO REG32(TIMER_BASE + 0x0)
#define TIMER_MTIME_HI REG32(TIMER_BASE + 0x4)
#define TIMER_CMP_LO REG32(TIMER_BASE + 0x8)
#define TIMER_CMP_HI REG32(TIMER_BASE + 0xC)

static inline void uart_putc(char c) {
  while (UART_STATUS & UART_TX_FULL) {
  }
  UART_TXDATA = (uint8_t)c;
}

static inline void uart_puts(const char *s) {
  while (*s) uart_putc(*s++);
}

static inline void uart_flush(void) {
  while ((UART_STATUS & (UART_TX_EMPTY | UART_TX_BUSY)) != UART_TX_EMPTY) {
  }
}

static inline void uart_putu(uint32_t v) {
  char buf[11];
  int i = 0;
  do {
    buf[i++] = (char)('0' + v % 10);
    v /= 10;
  } while (v);
  while (i) uart_putc(buf[--i]);
}
