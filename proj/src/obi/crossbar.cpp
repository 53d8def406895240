#include "croc/obi/crossbar.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace croc::obi {

std::string_view manager_name(ManagerId id) {
  switch (id) {
    case ManagerId::Data: return "data";
    case ManagerId::Instr: return "instr";
    case ManagerId::User: return "user";
  }
  return "?";
}

bool overlaps(const AddressRule& a, const AddressRule& b) { return a.base < b.end() && b.base < a.end(); }

std::optional<SubordinateId> map_lookup(std::span<const AddressRule> rules, std::uint32_t addr) {
  for (const auto& rule : rules)
    if (rule.contains(addr)) return rule.target;
  return std::nullopt;
}

std::vector<PendingRequest> arbitrate(std::span<const PendingRequest> pending, Arbitration policy,
                                      std::span<const std::size_t> rr_next) {
  std::vector<PendingRequest> winners;
  for (const auto& req : pending) {
    auto it = std::find_if(winners.begin(), winners.end(),
                           [&](const PendingRequest& w) { return w.target == req.target; });
    if (it == winners.end()) {
      winners.push_back(req);
      continue;
    }
    const auto rank = [&](ManagerId m) {
      const std::size_t i = static_cast<std::size_t>(m);
      if (policy == Arbitration::FixedPriority || req.target >= rr_next.size()) return i;
      return (i + kManagerCount - rr_next[req.target] % kManagerCount) % kManagerCount;
    };
    if (rank(req.manager) < rank(it->manager)) *it = req;
  }
  return winners;
}

SubordinateId Crossbar::attach(AddressRule rule, Subordinate& subordinate) {
  if (rule.size == 0) throw OverlapError(fmt::format("rule '{}' has zero size", rule.name));
  if (rule.end() > 0x1'0000'0000ULL) throw OverlapError(fmt::format("rule '{}' wraps the address space", rule.name));
  for (const auto& existing : rules_)
    if (overlaps(existing, rule))
      throw OverlapError(fmt::format("rule '{}' [{}, +{:#x}) overlaps '{}'", rule.name, hex32(rule.base), rule.size,
                                     existing.name));
  rule.target = subordinates_.size();
  subordinates_.push_back(&subordinate);
  rr_next_.push_back(0);
  rules_.push_back(std::move(rule));
  return rules_.back().target;
}

void Crossbar::detach(std::string_view name) {
  // Subordinate slots stay allocated so ids of other rules remain stable.
  auto it = std::find_if(rules_.begin(), rules_.end(), [&](const AddressRule& r) { return r.name == name; });
  if (it == rules_.end()) return;
  subordinates_[it->target] = nullptr;
  rules_.erase(it);
}

const AddressRule* Crossbar::rule_named(std::string_view name) const {
  for (const auto& r : rules_)
    if (r.name == name) return &r;
  return nullptr;
}

std::uint64_t Crossbar::request(ManagerId manager, std::uint32_t addr, bool we, std::uint8_t be, std::uint32_t wdata) {
  const std::size_t m = index(manager);
  if (outstanding_[m]) throw std::logic_error("OBI manager already has an outstanding request");
  if (we && (be & 0xF) == 0) throw std::invalid_argument("OBI write with empty byte enable");
  ObiTransaction txn;
  txn.id = next_id_++;
  txn.addr = addr;
  txn.we = we;
  txn.be = static_cast<std::uint8_t>(be & 0xF);
  txn.wdata = wdata;
  txn.manager = manager;
  txn.issued_cycle = now_;
  waiting_[m] = txn;
  outstanding_[m] = true;
  return txn.id;
}

const std::vector<ObiTransaction>& Crossbar::tick() {
  // A channel: arbitrate and grant in cycle now_.
  pending_scratch_.clear();
  for (std::size_t m = 0; m < kManagerCount; ++m) {
    if (!waiting_[m]) continue;
    const auto target = lookup(waiting_[m]->addr);
    if (!target) {
      // Unmapped: the internal error subordinate accepts every request.
      ObiTransaction txn = *waiting_[m];
      txn.granted_cycle = now_;
      txn.response_cycle = now_ + 1;
      txn.err = true;
      txn.rdata = 0;
      in_flight_.push_back(txn);
      waiting_[m].reset();
      ++grants_;
      continue;
    }
    pending_scratch_.push_back({static_cast<ManagerId>(m), *target});
  }

  for (const auto& win : arbitrate(pending_scratch_, policy_, rr_next_)) {
    const std::size_t m = index(win.manager);
    ObiTransaction txn = *waiting_[m];
    waiting_[m].reset();
    txn.granted_cycle = now_;
    Subordinate* sub = subordinates_[win.target];
    const ObiResponse resp = sub->access(txn);
    txn.rdata = txn.we ? 0U : resp.rdata;
    txn.err = resp.err;
    txn.response_cycle = now_ + std::max(1U, sub->latency());
    in_flight_.push_back(txn);
    rr_next_[win.target] = (m + 1) % kManagerCount;
    ++grants_;
  }

  // R channel: deliver responses due at the new cycle.
  ++now_;
  delivered_.clear();
  for (auto it = in_flight_.begin(); it != in_flight_.end();) {
    if (it->response_cycle <= now_) {
      delivered_.push_back(*it);
      it = in_flight_.erase(it);
    } else {
      ++it;
    }
  }
  std::sort(delivered_.begin(), delivered_.end(),
            [](const ObiTransaction& a, const ObiTransaction& b) { return a.manager < b.manager; });
  for (const auto& txn : delivered_) {
    const std::size_t m = index(txn.manager);
    mailbox_[m] = txn;
    outstanding_[m] = false;
    ++responses_;
    if (log_) *log_ << format_log_line(txn) << '\n';
  }
  return delivered_;
}

std::optional<ObiTransaction> Crossbar::take_response(ManagerId manager) {
  auto& slot = mailbox_[index(manager)];
  std::optional<ObiTransaction> out = slot;
  slot.reset();
  return out;
}

void Crossbar::reset() {
  for (auto& w : waiting_) w.reset();
  for (auto& m : mailbox_) m.reset();
  outstanding_.fill(false);
  in_flight_.clear();
  delivered_.clear();
  std::fill(rr_next_.begin(), rr_next_.end(), 0);
  now_ = 0;
}

std::string Crossbar::format_log_line(const ObiTransaction& txn) {
  return fmt::format("cycle={} mgr={} addr=0x{:08x} we={} be=0x{:x} data=0x{:08x} err={}", txn.response_cycle,
                     manager_name(txn.manager), txn.addr, txn.we ? 1 : 0, txn.be, txn.we ? txn.wdata : txn.rdata,
                     txn.err ? 1 : 0);
}

}  // namespace croc::obi
