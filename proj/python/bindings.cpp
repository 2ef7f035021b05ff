#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "htax/sim.hpp"

namespace py = pybind11;

namespace {

// Python ints are unbounded; move 128-bit values through their decimal form.
htax::u128 u128_from_object(py::handle src) {
  py::object as_int = py::reinterpret_steal<py::object>(PyNumber_Index(src.ptr()));
  if (!as_int) throw py::error_already_set();
  std::string text = py::str(as_int).cast<std::string>();
  if (!text.empty() && text[0] == '-') throw py::value_error("amount cannot be negative");
  return htax::u128_from_string(text);
}

py::object u128_to_object(htax::u128 v) {
  return py::reinterpret_steal<py::object>(
      PyLong_FromString(htax::u128_to_string(v).c_str(), nullptr, 10));
}

}  // namespace

namespace pybind11::detail {

template <>
struct type_caster<htax::Money> {
  PYBIND11_TYPE_CASTER(htax::Money, const_name("int"));

  bool load(handle src, bool) {
    if (!PyNumber_Check(src.ptr()) || PyFloat_Check(src.ptr())) return false;
    try {
      value = htax::Money(u128_from_object(src));
    } catch (const htax::Error&) {
      return false;
    }
    return true;
  }

  static handle cast(htax::Money v, return_value_policy, handle) {
    return u128_to_object(v.raw()).release();
  }
};

template <>
struct type_caster<htax::u128> {
  PYBIND11_TYPE_CASTER(htax::u128, const_name("int"));

  bool load(handle src, bool) {
    if (!PyNumber_Check(src.ptr()) || PyFloat_Check(src.ptr())) return false;
    try {
      value = u128_from_object(src);
    } catch (const htax::Error&) {
      return false;
    }
    return true;
  }

  static handle cast(htax::u128 v, return_value_policy, handle) {
    return u128_to_object(v).release();
  }
};

}  // namespace pybind11::detail

using namespace htax;

PYBIND11_MODULE(_htax, m) {
  m.doc() = "Harberger-tax prediction market engine";

  static py::exception<Error> exc(m, "MarketError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object payload = py::str(e.what());
      PyErr_SetObject(exc.ptr(), payload.ptr());
    }
  });

  py::enum_<ContractState>(m, "ContractState")
      .value("Created", ContractState::Created)
      .value("Opened", ContractState::Opened)
      .value("Closed", ContractState::Closed)
      .value("Matured", ContractState::Matured)
      .value("Reported", ContractState::Reported)
      .value("Resolved", ContractState::Resolved)
      .value("Settled", ContractState::Settled)
      .value("Invalid", ContractState::Invalid);

  py::enum_<SnapshotOutcome>(m, "SnapshotOutcome")
      .value("NONE", SnapshotOutcome::None)
      .value("WINDOW1", SnapshotOutcome::Window1)
      .value("WINDOW2", SnapshotOutcome::Window2);

  py::class_<MarketParams>(m, "MarketParams")
      .def(py::init<>())
      .def_readwrite("initial_timestamp", &MarketParams::initial_timestamp)
      .def_readwrite("period", &MarketParams::period)
      .def_readwrite("granularity", &MarketParams::granularity)
      .def_readwrite("rate_scale", &MarketParams::rate_scale)
      .def_readwrite("tax_bps", &MarketParams::tax_bps)
      .def_readwrite("market_fee_bps", &MarketParams::market_fee_bps)
      .def_readwrite("protocol_fee_bps", &MarketParams::protocol_fee_bps)
      .def_readwrite("reporting_interval", &MarketParams::reporting_interval)
      .def_readwrite("accounting_decimals", &MarketParams::accounting_decimals)
      .def_readwrite("fee_recipient_market", &MarketParams::fee_recipient_market)
      .def_readwrite("fee_recipient_protocol", &MarketParams::fee_recipient_protocol)
      .def("validate", &MarketParams::validate);

  py::class_<PurchaseReceipt>(m, "PurchaseReceipt")
      .def_property_readonly("frame", [](const PurchaseReceipt& r) { return r.lot.frame.n; })
      .def_property_readonly("bin", [](const PurchaseReceipt& r) { return r.lot.bin.m; })
      .def_readonly("buyer", &PurchaseReceipt::buyer)
      .def_readonly("price", &PurchaseReceipt::price)
      .def_readonly("cost", &PurchaseReceipt::cost)
      .def_readonly("escrow", &PurchaseReceipt::escrow)
      .def_readonly("acquisition_paid", &PurchaseReceipt::acquisition_paid)
      .def_readonly("previous_owner", &PurchaseReceipt::previous_owner)
      .def_readonly("tax_charged_prev", &PurchaseReceipt::tax_charged_prev)
      .def_readonly("refund_prev", &PurchaseReceipt::refund_prev)
      .def_readonly("snapshot", &PurchaseReceipt::snapshot);

  py::class_<Resolution>(m, "Resolution")
      .def_property_readonly("reported_rate",
                             [](const Resolution& r) -> py::object {
                               return r.reported_rate ? py::cast(*r.reported_rate) : py::none();
                             })
      .def_property_readonly("winning_bin",
                             [](const Resolution& r) -> py::object {
                               return r.winning_bin ? py::cast(r.winning_bin->m) : py::none();
                             })
      .def_property_readonly("winner",
                             [](const Resolution& r) -> py::object {
                               return r.winner ? py::cast(*r.winner) : py::none();
                             })
      .def_readonly("pool", &Resolution::pool)
      .def_readonly("reward", &Resolution::reward)
      .def_readonly("fee_market", &Resolution::fee_market)
      .def_readonly("fee_protocol", &Resolution::fee_protocol)
      .def_readonly("dust", &Resolution::dust)
      .def_property_readonly("invalid_reason",
                             [](const Resolution& r) -> py::object {
                               return r.invalid_reason
                                          ? py::cast(std::string(invalid_reason_name(*r.invalid_reason)))
                                          : py::none();
                             })
      .def_readonly("resolved_at", &Resolution::resolved_at);

  py::class_<LedgerTotals>(m, "LedgerTotals")
      .def_readonly("deposited", &LedgerTotals::total_deposited)
      .def_readonly("withdrawn", &LedgerTotals::total_withdrawn)
      .def_readonly("custody", &LedgerTotals::custody)
      .def_readonly("fee_market", &LedgerTotals::fee_market)
      .def_readonly("fee_protocol", &LedgerTotals::fee_protocol)
      .def_readonly("pool_sum", &LedgerTotals::pool_sum)
      .def_readonly("free_sum", &LedgerTotals::free_sum);

  py::class_<AmmPair>(m, "AmmPair")
      .def("set_spot_rate", &AmmPair::set_spot_rate, py::arg("t"), py::arg("rate"))
      .def("cumulative_at", &AmmPair::cumulative_at, py::arg("t"))
      .def("spot_rate_at", &AmmPair::spot_rate_at, py::arg("t"));

  py::class_<Market>(m, "Market")
      .def(py::init<MarketParams>(), py::arg("params"))
      .def_property_readonly("params", &Market::params, py::return_value_policy::copy)
      .def_property_readonly("amm", py::overload_cast<>(&Market::amm),
                             py::return_value_policy::reference_internal)
      .def("deposit", &Market::deposit, py::arg("account"), py::arg("amount"), py::arg("now") = 0)
      .def("balance", &Market::balance, py::arg("account"))
      .def("withdraw", &Market::withdraw, py::arg("account"), py::arg("now"))
      .def(
          "buy_lot",
          [](Market& self, std::uint64_t frame, std::uint64_t bin, const AccountId& buyer,
             Money price, Timestamp now) {
            return self.buy_lot(LotId{FrameIndex{frame}, BinIndex{bin}}, buyer, price, now);
          },
          py::arg("frame"), py::arg("bin"), py::arg("buyer"), py::arg("price"), py::arg("now"))
      .def(
          "finalize_frame_taxes",
          [](Market& self, std::uint64_t n, Timestamp now) {
            self.finalize_frame_taxes(FrameIndex{n}, now);
          },
          py::arg("frame"), py::arg("now"))
      .def(
          "pool_balance",
          [](const Market& self, std::uint64_t n) { return self.pool_balance(FrameIndex{n}); },
          py::arg("frame"))
      .def(
          "report_snapshot",
          [](Market& self, std::uint64_t n, Timestamp now) {
            return self.report_snapshot(FrameIndex{n}, now);
          },
          py::arg("frame"), py::arg("now"))
      .def("report_at", &Market::report_at, py::arg("now"))
      .def(
          "reported_rate",
          [](const Market& self, std::uint64_t n) { return self.reported_rate(FrameIndex{n}); },
          py::arg("frame"))
      .def(
          "resolve",
          [](Market& self, std::uint64_t n, Timestamp now) {
            return self.resolve(FrameIndex{n}, now);
          },
          py::arg("frame"), py::arg("now"), py::return_value_policy::copy)
      .def(
          "settle",
          [](Market& self, std::uint64_t n, const AccountId& account, Timestamp now) {
            return self.settle(FrameIndex{n}, account, now);
          },
          py::arg("frame"), py::arg("account"), py::arg("now"))
      .def(
          "contract_state",
          [](const Market& self, std::uint64_t n, Timestamp now) {
            return self.contract_state(FrameIndex{n}, now);
          },
          py::arg("frame"), py::arg("now"))
      .def("balances", [](const Market& self) { return self.balances(); })
      .def("totals", &Market::totals)
      .def("conservation_holds", &Market::conservation_holds)
      .def(
          "report_json",
          [](const Market& self, Timestamp as_of) {
            return market_report_json(self, as_of).dump(2) + "\n";
          },
          py::arg("as_of"));

  // grid helpers
  m.def(
      "frame_of_time",
      [](Timestamp t, const MarketParams& p) { return frame_of_time(t, p).n; }, py::arg("t"),
      py::arg("params"));
  m.def(
      "frame_bounds",
      [](std::uint64_t n, const MarketParams& p) {
        FrameBounds b = frame_bounds(FrameIndex{n}, p);
        return py::make_tuple(b.k_start, b.k_end);
      },
      py::arg("frame"), py::arg("params"));
  m.def(
      "bin_of_rate", [](Rate r, const MarketParams& p) { return bin_of_rate(r, p).m; },
      py::arg("rate"), py::arg("params"));
  m.def(
      "bin_bounds",
      [](std::uint64_t mth, const MarketParams& p) {
        BinBounds b = bin_bounds(BinIndex{mth}, p);
        return py::make_tuple(b.lo, b.hi);
      },
      py::arg("bin"), py::arg("params"));
  m.def(
      "is_valid_purchase_frame",
      [](std::uint64_t n, Timestamp now, const MarketParams& p) {
        return is_valid_purchase_frame(FrameIndex{n}, now, p);
      },
      py::arg("frame"), py::arg("now"), py::arg("params"));
  m.def(
      "trading_close",
      [](std::uint64_t n, const MarketParams& p) { return trading_close(FrameIndex{n}, p); },
      py::arg("frame"), py::arg("params"));
  m.def(
      "maturity", [](std::uint64_t n, const MarketParams& p) { return maturity(FrameIndex{n}, p); },
      py::arg("frame"), py::arg("params"));

  // tax and oracle arithmetic
  m.def("accrued_tax", &accrued_tax, py::arg("price"), py::arg("span"), py::arg("params"));
  m.def("max_tax", &max_tax, py::arg("price"), py::arg("now"), py::arg("close"), py::arg("params"));
  m.def("twap", &twap, py::arg("cum1"), py::arg("t1"), py::arg("cum2"), py::arg("t2"));

  // scenario pipeline
  m.def(
      "validate_scenario", [](const std::string& text) { load_scenario(text); },
      py::arg("text"), "Raises MarketError when the scenario document is malformed.");
  m.def(
      "run_scenario_json",
      [](const std::string& text) { return run_scenario(load_scenario(text)).to_json_text(); },
      py::arg("text"), "Run a scenario document; returns the canonical machine report (JSON).");
  m.def(
      "verify_report_json",
      [](const std::string& report_text) {
        CheckSummary s = verify_report_text(report_text);
        std::vector<std::pair<std::string, std::string>> out;
        out.reserve(s.violations.size());
        for (const Violation& v : s.violations) out.emplace_back(v.check, v.detail);
        return out;
      },
      py::arg("report_text"), "Re-audit a machine report; returns (check, detail) violations.");
}
