#pragma once

#include "croc/bits.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace croc::obi {

/// Manager ports, listed in fixed-priority order (index 0 wins).
enum class ManagerId : std::uint8_t { Data = 0, Instr = 1, User = 2 };
inline constexpr std::size_t kManagerCount = 3;

std::string_view manager_name(ManagerId id);

struct ObiTransaction {
  std::uint64_t id = 0;
  std::uint32_t addr = 0;
  bool we = false;
  std::uint8_t be = 0xF;
  std::uint32_t wdata = 0;
  ManagerId manager = ManagerId::Data;
  Cycle issued_cycle = 0;
  Cycle granted_cycle = 0;
  Cycle response_cycle = 0;
  std::uint32_t rdata = 0;
  bool err = false;
};

struct ObiResponse {
  std::uint32_t rdata = 0;
  bool err = false;
};

/// A bus subordinate. access() runs in the grant cycle (txn.granted_cycle is
/// valid); the response becomes visible `latency()` cycles later.
class Subordinate {
 public:
  virtual ~Subordinate() = default;
  virtual ObiResponse access(const ObiTransaction& txn) = 0;
  virtual unsigned latency() const { return 1; }
};

using SubordinateId = std::size_t;

struct AddressRule {
  std::uint32_t base = 0;
  std::uint32_t size = 0;
  SubordinateId target = 0;
  std::string name;

  bool contains(std::uint32_t addr) const { return addr >= base && addr - base < size; }
  std::uint64_t end() const { return static_cast<std::uint64_t>(base) + size; }
};

bool overlaps(const AddressRule& a, const AddressRule& b);

/// Unique rule containing addr, else nullopt (unmapped).
std::optional<SubordinateId> map_lookup(std::span<const AddressRule> rules, std::uint32_t addr);

class OverlapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Arbitration : std::uint8_t { FixedPriority, RoundRobin };

/// A manager request competing for one subordinate in the current cycle.
struct PendingRequest {
  ManagerId manager;
  SubordinateId target;
};

/// Winner per subordinate. Fixed priority: lowest ManagerId. Round robin:
/// first manager at or after `rr_next[target]` in cyclic order.
std::vector<PendingRequest> arbitrate(std::span<const PendingRequest> pending, Arbitration policy,
                                      std::span<const std::size_t> rr_next = {});

/// N-manager x M-subordinate crossbar modelling the OBI A (req/gnt) and
/// R (rvalid) channels with one outstanding transaction per manager.
///
/// Per cycle: requests submitted since the previous tick are arbitrated per
/// subordinate, winners are granted and forwarded, then the cycle counter
/// advances and every response whose latency elapsed is delivered.
class Crossbar {
 public:
  explicit Crossbar(Arbitration policy = Arbitration::FixedPriority) : policy_(policy) {}

  /// Registers a subordinate under a new address rule. Throws OverlapError
  /// for zero-size or overlapping rules. The subordinate must outlive the crossbar.
  SubordinateId attach(AddressRule rule, Subordinate& subordinate);
  void detach(std::string_view name);

  std::optional<SubordinateId> lookup(std::uint32_t addr) const { return map_lookup(rules_, addr); }
  const std::vector<AddressRule>& rules() const { return rules_; }
  const AddressRule* rule_named(std::string_view name) const;

  /// Raises a request on a manager port. Returns the transaction id.
  /// Throws std::logic_error if the port already has one outstanding.
  std::uint64_t request(ManagerId manager, std::uint32_t addr, bool we, std::uint8_t be, std::uint32_t wdata);

  bool busy(ManagerId manager) const { return outstanding_[index(manager)]; }

  /// Advances one cycle and returns the responses delivered at the new cycle.
  const std::vector<ObiTransaction>& tick();

  /// Takes the delivered response for a manager, if any.
  std::optional<ObiTransaction> take_response(ManagerId manager);

  Cycle now() const { return now_; }
  void set_now(Cycle cycle) { now_ = cycle; }
  void reset();

  std::uint64_t grants() const { return grants_; }
  std::uint64_t responses() const { return responses_; }

  /// One line per delivered response; nullptr disables logging.
  void set_log(std::ostream* log) { log_ = log; }
  static std::string format_log_line(const ObiTransaction& txn);

  Arbitration policy() const { return policy_; }
  void set_policy(Arbitration policy) { policy_ = policy; }

 private:
  static std::size_t index(ManagerId m) { return static_cast<std::size_t>(m); }

  Arbitration policy_;
  std::vector<AddressRule> rules_;
  std::vector<Subordinate*> subordinates_;
  std::vector<std::size_t> rr_next_;

  Cycle now_ = 0;
  std::uint64_t next_id_ = 1;
  std::array<std::optional<ObiTransaction>, kManagerCount> waiting_{};
  std::array<bool, kManagerCount> outstanding_{};
  std::vector<ObiTransaction> in_flight_;
  std::array<std::optional<ObiTransaction>, kManagerCount> mailbox_{};
  std::vector<ObiTransaction> delivered_;
  std::vector<PendingRequest> pending_scratch_;

  std::uint64_t grants_ = 0;
  std::uint64_t responses_ = 0;
  std::ostream* log_ = nullptr;
};

}  // namespace croc::obi
