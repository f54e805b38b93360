#include "ffsplit/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace ffsplit {

namespace {

// shortest text that reads back to the same double
std::string num(double v) {
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "variable,value,policy,episodes,slots,throughput,throughput_stderr,fronthaul,fronthaul_stderr,"
        "budget,waste,clamped,max_imbalance,eta,exact_rate,exact_fronthaul,error\n";
  for (const auto& r : rows) {
    os << csv_field(r.variable) << ',' << num(r.value) << ',' << csv_field(r.policy) << ',' << r.episodes << ','
       << r.slots << ',' << num(r.throughput) << ',' << num(r.throughput_stderr) << ',' << num(r.fronthaul) << ','
       << num(r.fronthaul_stderr) << ',' << num(r.budget) << ',' << num(r.waste) << ',' << r.clamped << ','
       << num(r.max_imbalance) << ',' << num(r.eta) << ',' << num(r.exact_rate) << ',' << num(r.exact_fronthaul)
       << ',' << csv_field(r.error) << '\n';
  }
  return os.str();
}

std::string trace_csv(const EpisodeTrace& trace, const SystemConfig& cfg) {
  std::ostringstream os;
  os << "slot,epoch,block,channel,arrival,transmit,mode,power,rate,fronthaul,battery\n";
  for (const auto& r : trace.records) {
    os << r.slot + 1 << ',' << r.epoch + 1 << ',' << r.block + 1 << ',' << r.channel + 1 << ',' << num(r.arrival) << ','
       << (r.transmit ? 1 : 0) << ',' << (r.transmit ? cfg.catalog[r.mode].id : 0) << ',' << num(r.power) << ','
       << num(r.rate) << ',' << num(r.fronthaul) << ',' << num(r.battery) << '\n';
  }
  return os.str();
}

std::string offline_csv(const OfflineSolution& sol) {
  std::ostringstream os;
  os << "epoch,block,mode,gain,duration,power,energy\n";
  for (std::size_t m = 0; m < sol.epochs; ++m)
    for (std::size_t n = 0; n < sol.blocks; ++n)
      for (std::size_t x = 0; x < sol.modes; ++x) {
        const double th = sol.duration(m, n, x), p = sol.power(m, n, x);
        os << m + 1 << ',' << n + 1 << ',' << sol.catalog[x].id << ',' << num(sol.gain(m, n)) << ',' << num(th)
           << ',' << num(p) << ',' << num(th * (p + sol.catalog[x].processing_power)) << '\n';
      }
  return os.str();
}

std::string rounded_csv(const IntegerSolution& sol, const ModeCatalog& catalog) {
  std::ostringstream os;
  os << "epoch,block,mode,gain,slots,power,energy\n";
  for (std::size_t m = 0; m < sol.epochs; ++m)
    for (std::size_t n = 0; n < sol.blocks; ++n)
      for (std::size_t x = 0; x < sol.modes; ++x) {
        const int k = sol.slot_count(m, n, x);
        const double p = sol.power(m, n, x);
        os << m + 1 << ',' << n + 1 << ',' << catalog[x].id << ',' << num(sol.gains[m * sol.blocks + n]) << ','
           << k << ',' << num(p) << ',' << num(k * (p + catalog[x].processing_power)) << '\n';
      }
  return os.str();
}

}  // namespace ffsplit
