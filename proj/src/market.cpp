#include "htax/market.hpp"

#include <utility>

namespace htax {

namespace {

std::string free_bucket(const AccountId& account) { return "free:" + account; }
std::string pool_bucket(std::uint64_t n) { return "pool:" + std::to_string(n); }

}  // namespace

const char* invalid_reason_name(InvalidReason reason) noexcept {
  switch (reason) {
    case InvalidReason::NoLots: return "NoLots";
    case InvalidReason::NoWinningLot: return "NoWinningLot";
    case InvalidReason::ReportingError: return "ReportingError";
  }
  return "?";
}

const char* event_kind_name(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Deposit: return "deposit";
    case EventKind::Purchase: return "purchase";
    case EventKind::TaxCharge: return "tax_charge";
    case EventKind::Refund: return "refund";
    case EventKind::PoolCredit: return "pool_credit";
    case EventKind::Fee: return "fee";
    case EventKind::Settle: return "settle";
    case EventKind::Withdrawal: return "withdrawal";
    case EventKind::Snapshot: return "snapshot";
    case EventKind::Finalize: return "finalize";
    case EventKind::Resolve: return "resolve";
  }
  return "?";
}

Money accrued_tax(Money price, Duration span, const MarketParams& params) {
  if (span < 0) fail(Errc::Underflow, "negative ownership span");
  u128 numerator = checked_mul_u128(static_cast<u128>(params.tax_bps), static_cast<u128>(span));
  u128 denominator = checked_mul_u128(u128{10000}, static_cast<u128>(params.period));
  return mul_div_floor(price, numerator, denominator);
}

Money max_tax(Money price, Timestamp now, Timestamp close, const MarketParams& params) {
  if (now > close)
    fail(Errc::PurchaseAfterClose, "t=" + std::to_string(now) + " is past trading close " +
                                       std::to_string(close));
  return accrued_tax(price, close - now, params);
}

Market::Market(MarketParams params) : params_(std::move(params)) { params_.validate(); }

FrameRecord& Market::ensure_frame(FrameIndex n) {
  auto [it, inserted] = frames_.try_emplace(n.n);
  if (inserted) it->second.frame = n;
  return it->second;
}

LedgerEvent& Market::append_event(EventKind kind, Timestamp t) {
  LedgerEvent& ev = events_.emplace_back();
  ev.seq = next_seq_++;
  ev.t = t;
  ev.kind = kind;
  return ev;
}

void Market::deposit(const AccountId& account, Money amount, Timestamp now) {
  total_deposited_ += amount;
  accounts_[account] += amount;
  LedgerEvent& ev = append_event(EventKind::Deposit, now);
  ev.from_bucket = "external";
  ev.to_bucket = free_bucket(account);
  ev.amount = amount;
  ev.account = account;
}

Money Market::balance(const AccountId& account) const {
  auto it = accounts_.find(account);
  return it == accounts_.end() ? Money{} : it->second;
}

Money Market::withdraw(const AccountId& account, Timestamp now) {
  auto it = accounts_.find(account);
  if (it == accounts_.end() || it->second.is_zero())
    fail(Errc::NothingToClaim, "account '" + account + "' has no free balance");
  Money amount = it->second;
  it->second = Money{};
  total_withdrawn_ += amount;
  LedgerEvent& ev = append_event(EventKind::Withdrawal, now);
  ev.from_bucket = free_bucket(account);
  ev.to_bucket = "external";
  ev.amount = amount;
  ev.account = account;
  return amount;
}

void Market::charge_tax_to_pool(FrameRecord& rec, const AccountId& owner, std::uint64_t bin,
                                Money amount, EventKind kind, Timestamp now) {
  custody_ -= amount;
  rec.pool += amount;
  rec.tax_paid[owner] += amount;
  LedgerEvent& ev = append_event(kind, now);
  ev.from_bucket = "custody";
  ev.to_bucket = pool_bucket(rec.frame.n);
  ev.amount = amount;
  ev.account = owner;
  ev.frame = rec.frame.n;
  ev.bin = bin;
}

PurchaseReceipt Market::buy_lot(LotId lot, const AccountId& buyer, Money new_price, Timestamp now) {
  if (!is_valid_purchase_frame(lot.frame, now, params_))
    fail(Errc::InvalidFrame, "frame " + std::to_string(lot.frame.n) + " does not start after t=" +
                                 std::to_string(now));
  Timestamp close = trading_close(lot.frame, params_);
  Money escrow = max_tax(new_price, now, close, params_);

  // Everything that can fail is computed before the first posting; a
  // rejected purchase leaves the market untouched.
  std::optional<Ownership> prev;
  if (const FrameRecord* rec = frame(lot.frame)) {
    if (rec->taxes_finalized)
      fail(Errc::InvalidFrame, "frame " + std::to_string(lot.frame.n) + " already finalized");
    auto it = rec->ownerships.find(lot.bin.m);
    if (it != rec->ownerships.end()) prev = it->second;
  }
  Money acquisition = prev ? prev->price : Money{};
  Money cost = escrow + acquisition;
  if (balance(buyer) < cost)
    fail(Errc::InsufficientBalance, "cost " + cost.to_string() + " exceeds balance " +
                                        balance(buyer).to_string() + " of '" + buyer + "'");
  Money tax_charged;
  Money refund;
  if (prev) {
    tax_charged = accrued_tax(prev->price, now - prev->acquired_at, params_);
    refund = prev->escrowed_max_tax - tax_charged;
  }

  FrameRecord& rec = ensure_frame(lot.frame);
  accounts_[buyer] -= cost;
  custody_ += cost;
  {
    LedgerEvent& ev = append_event(EventKind::Purchase, now);
    ev.from_bucket = free_bucket(buyer);
    ev.to_bucket = "custody";
    ev.amount = cost;
    ev.account = buyer;
    ev.frame = lot.frame.n;
    ev.bin = lot.bin.m;
    ev.price = new_price;
    ev.escrow = escrow;
    ev.acquisition = acquisition;
  }
  if (prev) {
    charge_tax_to_pool(rec, prev->owner, lot.bin.m, tax_charged, EventKind::TaxCharge, now);
    Money credited = refund + acquisition;
    custody_ -= credited;
    accounts_[prev->owner] += credited;
    LedgerEvent& ev = append_event(EventKind::Refund, now);
    ev.from_bucket = "custody";
    ev.to_bucket = free_bucket(prev->owner);
    ev.amount = credited;
    ev.account = prev->owner;
    ev.frame = lot.frame.n;
    ev.bin = lot.bin.m;
    ev.escrow = refund;
    ev.acquisition = acquisition;
  }
  rec.ownerships[lot.bin.m] = Ownership{buyer, new_price, now, escrow};

  PurchaseReceipt receipt;
  receipt.lot = lot;
  receipt.buyer = buyer;
  receipt.price = new_price;
  receipt.cost = cost;
  receipt.escrow = escrow;
  receipt.acquisition_paid = acquisition;
  if (prev) {
    receipt.previous_owner = prev->owner;
    receipt.tax_charged_prev = tax_charged;
    receipt.refund_prev = refund;
  }
  if (now >= params_.initial_timestamp)
    receipt.snapshot = report_snapshot(frame_of_time(now, params_), now);
  return receipt;
}

void Market::finalize_frame_taxes(FrameIndex n, Timestamp now) {
  Timestamp close = trading_close(n, params_);
  if (now < close)
    fail(Errc::FrameStillOpen, "frame " + std::to_string(n.n) + " trades until t=" +
                                   std::to_string(close));
  FrameRecord& rec = ensure_frame(n);
  if (rec.taxes_finalized) fail(Errc::AlreadyFinalized, "frame " + std::to_string(n.n));
  for (auto& [bin, owned] : rec.ownerships) {
    Money amount = owned.escrowed_max_tax;
    owned.escrowed_max_tax = Money{};
    charge_tax_to_pool(rec, owned.owner, bin, amount, EventKind::PoolCredit, now);
  }
  rec.taxes_finalized = true;
  LedgerEvent& ev = append_event(EventKind::Finalize, now);
  ev.frame = n.n;
}

Money Market::pool_balance(FrameIndex n) const {
  const FrameRecord* rec = frame(n);
  return rec ? rec->pool : Money{};
}

SnapshotOutcome Market::report_snapshot(FrameIndex n, Timestamp now) {
  auto it = frames_.find(n.n);
  if (it == frames_.end()) return SnapshotOutcome::None;
  FrameBounds bounds = frame_bounds(n, params_);
  Timestamp split = bounds.k_end - params_.reporting_interval;
  SnapshotOutcome slot = SnapshotOutcome::None;
  if (now >= bounds.k_start && now <= split)
    slot = SnapshotOutcome::Window1;
  else if (now > split && now <= bounds.k_end)
    slot = SnapshotOutcome::Window2;
  if (slot == SnapshotOutcome::None) return SnapshotOutcome::None;

  u128 cumulative = 0;
  try {
    cumulative = amm_.cumulative_at(now);
  } catch (const Error& e) {
    if (e.code() == Errc::TimeBeforePath) return SnapshotOutcome::None;
    throw;
  }
  Snapshot snap{now, cumulative};
  if (slot == SnapshotOutcome::Window1)
    it->second.reporting.window1 = snap;
  else
    it->second.reporting.window2 = snap;
  LedgerEvent& ev = append_event(EventKind::Snapshot, now);
  ev.frame = n.n;
  ev.cumulative = cumulative;
  ev.note = slot == SnapshotOutcome::Window1 ? "window1" : "window2";
  return slot;
}

SnapshotOutcome Market::report_at(Timestamp now) {
  return report_snapshot(frame_of_time(now, params_), now);
}

Rate Market::reported_rate(FrameIndex n) const {
  const FrameRecord* rec = frame(n);
  const ReportingState* reporting = rec ? &rec->reporting : nullptr;
  if (!reporting || !reporting->window1)
    fail(Errc::MissingSnapshot, "window1 of frame " + std::to_string(n.n));
  if (!reporting->window2)
    fail(Errc::MissingSnapshot, "window2 of frame " + std::to_string(n.n));
  return twap(reporting->window1->cumulative, reporting->window1->taken_at,
              reporting->window2->cumulative, reporting->window2->taken_at);
}

const Resolution& Market::resolve(FrameIndex n, Timestamp now) {
  if (now < maturity(n, params_))
    fail(Errc::NotMatured, "frame " + std::to_string(n.n) + " matures at t=" +
                               std::to_string(maturity(n, params_)));
  if (const FrameRecord* existing = frame(n); existing && existing->resolution)
    fail(Errc::AlreadyResolved, "frame " + std::to_string(n.n));
  FrameRecord& rec = ensure_frame(n);
  if (!rec.taxes_finalized) finalize_frame_taxes(n, now);

  Resolution res;
  res.pool = rec.pool;
  res.resolved_at = now;
  res.fee_market = bps_of(res.pool, params_.market_fee_bps);
  res.fee_protocol = bps_of(res.pool, params_.protocol_fee_bps);

  if (rec.ownerships.empty()) {
    res.invalid_reason = InvalidReason::NoLots;
  } else {
    try {
      Rate rate = reported_rate(n);
      res.reported_rate = rate;
      BinIndex bin = bin_of_rate(rate, params_);
      res.winning_bin = bin;
      auto it = rec.ownerships.find(bin.m);
      if (it != rec.ownerships.end())
        res.winner = it->second.owner;
      else
        res.invalid_reason = InvalidReason::NoWinningLot;
    } catch (const Error& e) {
      if (e.code() != Errc::MissingSnapshot) throw;
      res.invalid_reason = InvalidReason::ReportingError;
    }
  }

  auto post_fee = [&](Money amount, const std::string& bucket, const char* note) {
    if (amount.is_zero()) return;
    rec.pool -= amount;
    (bucket == "fee_market" ? fee_market_ : fee_protocol_) += amount;
    LedgerEvent& ev = append_event(EventKind::Fee, now);
    ev.from_bucket = pool_bucket(n.n);
    ev.to_bucket = bucket;
    ev.amount = amount;
    ev.frame = n.n;
    ev.note = note;
  };
  post_fee(res.fee_market, "fee_market", "market");
  post_fee(res.fee_protocol, "fee_protocol", "protocol");

  Money net = res.pool - res.fee_market - res.fee_protocol;
  if (res.winner) {
    res.reward = net;
    rec.settlements[*res.winner] = SettlementEntry{*res.winner, net};
  } else {
    // Taxes go back to whoever paid them, pro rata after fees; the floor
    // remainder is swept to the protocol fee bucket.
    Money distributed;
    for (const auto& [account, paid] : rec.tax_paid) {
      Money refund = res.pool.is_zero() ? Money{} : mul_div_floor(paid, net.raw(), res.pool.raw());
      rec.settlements[account] = SettlementEntry{account, refund};
      distributed += refund;
    }
    res.dust = net - distributed;
    post_fee(res.dust, "fee_protocol", "dust");
  }

  rec.resolution = res;
  LedgerEvent& ev = append_event(EventKind::Resolve, now);
  ev.frame = n.n;
  ev.rate = res.reported_rate;
  if (res.winner) ev.account = *res.winner;
  ev.note = res.invalid_reason ? invalid_reason_name(*res.invalid_reason) : "valid";
  return *rec.resolution;
}

Money Market::settle(FrameIndex n, const AccountId& account, Timestamp now) {
  auto it = frames_.find(n.n);
  if (it == frames_.end() || !it->second.resolution)
    fail(Errc::NotResolved, "frame " + std::to_string(n.n));
  auto entry_it = it->second.settlements.find(account);
  if (entry_it == it->second.settlements.end())
    fail(Errc::NothingToClaim, "'" + account + "' holds no claim on frame " + std::to_string(n.n));
  SettlementEntry& entry = entry_it->second;
  if (entry.claimed || entry.claimable.is_zero())
    fail(Errc::NothingToClaim, "'" + account + "' already settled frame " + std::to_string(n.n));
  Money amount = entry.claimable;
  it->second.pool -= amount;
  accounts_[account] += amount;
  entry.claimed = true;
  LedgerEvent& ev = append_event(EventKind::Settle, now);
  ev.from_bucket = pool_bucket(n.n);
  ev.to_bucket = free_bucket(account);
  ev.amount = amount;
  ev.account = account;
  ev.frame = n.n;
  return amount;
}

ContractState Market::contract_state(FrameIndex n, Timestamp now) const {
  FrameBounds bounds = frame_bounds(n, params_);
  if (now < bounds.k_start) return ContractState::Opened;
  if (now < bounds.k_end) return ContractState::Closed;
  const FrameRecord* rec = frame(n);
  if (!rec) return ContractState::Matured;
  if (rec->resolution) {
    if (rec->resolution->invalid_reason) return ContractState::Invalid;
    for (const auto& [account, entry] : rec->settlements)
      if (!entry.claimed && !entry.claimable.is_zero()) return ContractState::Resolved;
    return ContractState::Settled;
  }
  if (rec->reporting.window1 && rec->reporting.window2) return ContractState::Reported;
  return ContractState::Matured;
}

const FrameRecord* Market::frame(FrameIndex n) const {
  auto it = frames_.find(n.n);
  return it == frames_.end() ? nullptr : &it->second;
}

LedgerTotals Market::totals() const {
  LedgerTotals t;
  t.total_deposited = total_deposited_;
  t.total_withdrawn = total_withdrawn_;
  t.custody = custody_;
  t.fee_market = fee_market_;
  t.fee_protocol = fee_protocol_;
  for (const auto& [n, rec] : frames_) t.pool_sum += rec.pool;
  for (const auto& [account, free] : accounts_) t.free_sum += free;
  return t;
}

bool Market::conservation_holds() const {
  LedgerTotals t = totals();
  Money held = t.free_sum + t.custody + t.pool_sum + t.fee_market + t.fee_protocol;
  return t.total_deposited == t.total_withdrawn + held;
}

}  // namespace htax
