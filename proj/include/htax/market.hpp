#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "htax/amm.hpp"
#include "htax/grid.hpp"
#include "htax/money.hpp"
#include "htax/types.hpp"

namespace htax {

/// Current holder of a lot. The price is the owner's self-assessed
/// acquisition price, immutable until resale; the escrow covers the tax as
/// if the lot were held until trading close.
struct Ownership {
  AccountId owner;
  Money price;
  Timestamp acquired_at = 0;
  Money escrowed_max_tax;
};

struct Snapshot {
  Timestamp taken_at = 0;
  u128 cumulative = 0;
};

/// Two-window snapshot slots. Window 1 covers [k_n, k_n+period-t_rep],
/// window 2 covers (k_n+period-t_rep, k_n+period]; the latest snapshot per
/// window wins.
struct ReportingState {
  std::optional<Snapshot> window1;
  std::optional<Snapshot> window2;
};

enum class SnapshotOutcome { None, Window1, Window2 };

enum class InvalidReason { NoLots, NoWinningLot, ReportingError };

const char* invalid_reason_name(InvalidReason reason) noexcept;

struct Resolution {
  std::optional<Rate> reported_rate;      // absent when reporting failed
  std::optional<BinIndex> winning_bin;    // absent when no rate was reported
  std::optional<AccountId> winner;        // set iff the frame resolved valid
  Money pool;                             // taxes collected, at resolve time
  Money reward;                           // pool minus fees, 0 when invalid
  Money fee_market;
  Money fee_protocol;
  Money dust;                             // rounding remainder of invalid refunds
  std::optional<InvalidReason> invalid_reason;
  Timestamp resolved_at = 0;
};

struct SettlementEntry {
  AccountId account;
  Money claimable;
  bool claimed = false;
};

/// Per-frame contract state: the ownership map, tax pool, oracle snapshots
/// and, once matured, the resolution outcome.
struct FrameRecord {
  FrameIndex frame;
  std::map<std::uint64_t, Ownership> ownerships;  // bin -> current owner
  Money pool;                                     // live bucket; drained by fees and settlements
  bool taxes_finalized = false;
  ReportingState reporting;
  std::optional<Resolution> resolution;
  std::map<AccountId, Money> tax_paid;            // per-account total tax charged
  std::map<AccountId, SettlementEntry> settlements;
};

enum class EventKind {
  Deposit,     // external -> free
  Purchase,    // free -> custody (full cost)
  TaxCharge,   // custody -> pool, charged to the resold-out owner
  Refund,      // custody -> free, unearned escrow plus acquisition proceeds
  PoolCredit,  // custody -> pool, escrow sweep at finalize
  Fee,         // pool -> fee bucket
  Settle,      // pool -> free, reward or invalid refund
  Withdrawal,  // free -> external
  Snapshot,    // informational
  Finalize,    // informational
  Resolve,     // informational
};

const char* event_kind_name(EventKind kind) noexcept;

/// One append-only ledger record. Events with non-empty from/to buckets are
/// postings; the rest are informational markers.
struct LedgerEvent {
  std::uint64_t seq = 0;
  Timestamp t = 0;
  EventKind kind = EventKind::Deposit;
  std::string from_bucket;  // "external", "free:<id>", "custody", "pool:<n>", "fee_market", "fee_protocol"
  std::string to_bucket;
  Money amount;
  AccountId account;
  std::optional<std::uint64_t> frame;
  std::optional<std::uint64_t> bin;
  std::optional<Money> price;        // purchase: new self-assessed price
  std::optional<Money> escrow;       // purchase: max-tax escrow part of the cost
  std::optional<Money> acquisition;  // purchase/refund: acquisition-price part
  std::optional<Rate> rate;          // resolve: reported rate
  std::optional<u128> cumulative;    // snapshot: accumulator value
  std::string note;                  // window id, fee bucket, invalid reason, ...
};

struct LedgerTotals {
  Money total_deposited;
  Money total_withdrawn;
  Money custody;
  Money fee_market;
  Money fee_protocol;
  Money pool_sum;
  Money free_sum;
};

struct PurchaseReceipt {
  LotId lot;
  AccountId buyer;
  Money price;
  Money cost;              // escrow + acquisition
  Money escrow;
  Money acquisition_paid;  // previous owner's price, 0 for an unowned lot
  std::optional<AccountId> previous_owner;
  Money tax_charged_prev;
  Money refund_prev;       // unearned escrow returned to the previous owner
  SnapshotOutcome snapshot = SnapshotOutcome::None;
};

/// Tax accrued on a self-assessed price over `span` seconds:
/// floor(price * tax_bps * span / (10000 * period)).
Money accrued_tax(Money price, Duration span, const MarketParams& params);

/// Tax as if the lot were held from `now` until `close` (the escrow charged
/// at purchase). Throws PurchaseAfterClose when now > close.
Money max_tax(Money price, Timestamp now, Timestamp close, const MarketParams& params);

/// One prediction market: lot grid, double-entry fund ledger, simulated AMM
/// pair and per-frame contract lifecycle. All mutating calls must be
/// serialized by one logical writer; queries on a quiescent market are pure.
class Market {
 public:
  explicit Market(MarketParams params);

  const MarketParams& params() const { return params_; }
  AmmPair& amm() { return amm_; }
  const AmmPair& amm() const { return amm_; }

  // -- funds --------------------------------------------------------------
  void deposit(const AccountId& account, Money amount, Timestamp now = 0);
  Money balance(const AccountId& account) const;
  /// Pays out the account's whole free balance. Throws NothingToClaim.
  Money withdraw(const AccountId& account, Timestamp now);

  // -- trading ------------------------------------------------------------
  /// Harberger purchase: escrow the max tax on new_price, pay the current
  /// owner's acquisition price, charge their accrued tax into the pool and
  /// refund their unearned escrow. Creates the frame record on first touch
  /// and attempts an indirect oracle snapshot for the frame containing now.
  PurchaseReceipt buy_lot(LotId lot, const AccountId& buyer, Money new_price, Timestamp now);

  /// Sweep every remaining escrow of frame n into its pool. Callable once
  /// trading is closed; idempotence errors with AlreadyFinalized.
  void finalize_frame_taxes(FrameIndex n, Timestamp now);

  Money pool_balance(FrameIndex n) const;

  // -- oracle -------------------------------------------------------------
  /// Store the pair's cumulative rate into whichever reporting window of
  /// frame n contains now. Out-of-window attempts, attempts on frames
  /// without a record and attempts before the price path are silent no-ops.
  SnapshotOutcome report_snapshot(FrameIndex n, Timestamp now);

  /// Direct reporting trigger: snapshots the frame whose interval contains now.
  SnapshotOutcome report_at(Timestamp now);

  /// TWAP between the two stored snapshots, divided by their actual spacing.
  /// Throws MissingSnapshot naming the empty window.
  Rate reported_rate(FrameIndex n) const;

  // -- resolution ---------------------------------------------------------
  /// Determine the winning lot, charge fees and create settlement entries.
  /// Finalizes pending taxes first. Permissionless once the frame matured.
  const Resolution& resolve(FrameIndex n, Timestamp now);

  /// Move the account's claimable amount from pool custody to its free
  /// balance. Throws NotResolved / NothingToClaim.
  Money settle(FrameIndex n, const AccountId& account, Timestamp now);

  // -- queries ------------------------------------------------------------
  ContractState contract_state(FrameIndex n, Timestamp now) const;
  const FrameRecord* frame(FrameIndex n) const;
  const std::map<std::uint64_t, FrameRecord>& frames() const { return frames_; }
  const std::map<AccountId, Money>& balances() const { return accounts_; }
  const std::vector<LedgerEvent>& events() const { return events_; }

  LedgerTotals totals() const;
  /// total_deposited - total_withdrawn == free + custody + pools + fees
  bool conservation_holds() const;

 private:
  FrameRecord& ensure_frame(FrameIndex n);
  LedgerEvent& append_event(EventKind kind, Timestamp t);
  void charge_tax_to_pool(FrameRecord& rec, const AccountId& owner, std::uint64_t bin, Money amount,
                          EventKind kind, Timestamp now);

  MarketParams params_;
  AmmPair amm_;
  std::map<AccountId, Money> accounts_;
  Money custody_;
  Money fee_market_;
  Money fee_protocol_;
  Money total_deposited_;
  Money total_withdrawn_;
  std::map<std::uint64_t, FrameRecord> frames_;
  std::vector<LedgerEvent> events_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace htax
