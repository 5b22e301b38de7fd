#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hpflex/csv_io.hpp"
#include "hpflex/series.hpp"
#include "hpflex/static_data.hpp"

namespace hpflex {

// All hourly inputs of one country.
struct CountryProfiles {
  std::optional<HourlySeries> load;
  std::map<Technology, HourlySeries> availability;
  std::map<StorageTech, HourlySeries> inflow;
  HeatDemandSet heat;
  CopSet cops;

  explicit CountryProfiles(const CountryCode& c) : heat(c), cops(c) {}

  std::vector<const HourlySeries*> all() const {
    std::vector<const HourlySeries*> out;
    if (load) out.push_back(&*load);
    for (const auto& [k, s] : availability) out.push_back(&s);
    for (const auto& [k, s] : inflow) out.push_back(&s);
    for (const auto& [k, s] : heat.profiles()) out.push_back(&s);
    for (const auto& [k, s] : cops.profiles()) out.push_back(&s);
    return out;
  }
};

// Hourly series for every country plus cross-border limits. Every series of
// every country shares one start and one length.
class Dataset {
 public:
  Dataset() = default;

  static Dataset from_series(const std::vector<HourlySeries>& series) {
    Dataset d;
    std::map<CountryCode, std::map<HeatDemandSet::Key, HourlySeries>> heat;
    std::map<CountryCode, std::map<CopSet::Key, HourlySeries>> cops;
    for (const auto& s : series) {
      CountryProfiles& p = d.profiles_for(s.country());
      const auto parts = detail::split(s.quantity().qualifier, ':');
      switch (s.quantity().kind) {
        case QuantityKind::electric_load:
          if (p.load) fail(ErrorKind::malformed_row, s.country() + ": duplicate load series");
          p.load = s;
          break;
        case QuantityKind::availability_factor:
          p.availability.insert_or_assign(parse_technology(parts[0]), s);
          break;
        case QuantityKind::hydro_inflow:
          p.inflow.insert_or_assign(parse_storage(parts[0]), s);
          break;
        case QuantityKind::heat_demand:
          heat[s.country()].insert_or_assign({parse_building_type(parts[0]), parse_sink(parts[1])}, s);
          break;
        case QuantityKind::cop:
          cops[s.country()].insert_or_assign({parse_sink(parts[0]), parse_heat_pump_type(parts[1])}, s);
          break;
      }
    }
    for (auto& [c, m] : heat) d.profiles_for(c).heat = HeatDemandSet(c, std::move(m));
    for (auto& [c, m] : cops) d.profiles_for(c).cops = CopSet(c, std::move(m));
    d.validate();
    return d;
  }

  std::vector<CountryCode> countries() const {
    std::vector<CountryCode> out;
    for (const auto& [c, p] : profiles_) out.push_back(c);
    return out;
  }
  const CountryProfiles& country(const CountryCode& c) const {
    auto it = profiles_.find(c);
    if (it == profiles_.end()) fail(ErrorKind::invalid_argument, "dataset has no country " + c);
    return it->second;
  }
  bool has_country(const CountryCode& c) const { return profiles_.count(c) > 0; }

  NtcMatrix& ntc() { return ntc_; }
  const NtcMatrix& ntc() const { return ntc_; }

  // Annual bioenergy generation caps in GWh; countries without an entry fall
  // back to capacity x full-load hours.
  std::map<CountryCode, double>& bioenergy_cap_gwh() { return bio_cap_; }
  const std::map<CountryCode, double>& bioenergy_cap_gwh() const { return bio_cap_; }

  std::optional<HourStamp> start() const {
    for (const auto& [c, p] : profiles_)
      for (const HourlySeries* s : p.all()) return s->start();
    return std::nullopt;
  }
  std::size_t hours() const {
    for (const auto& [c, p] : profiles_)
      for (const HourlySeries* s : p.all()) return s->size();
    return 0;
  }

  std::vector<HourlySeries> all_series() const {
    std::vector<HourlySeries> out;
    for (const auto& [c, p] : profiles_)
      for (const HourlySeries* s : p.all()) out.push_back(*s);
    return out;
  }

  // July-June window of every series; NTC and caps carry over.
  Dataset window(int year, std::int64_t hours) const {
    std::vector<HourlySeries> cut;
    for (const auto& s : all_series()) cut.push_back(window_july_june(s, year, hours));
    Dataset d = from_series(cut);
    d.ntc_ = ntc_;
    d.bio_cap_ = bio_cap_;
    return d;
  }

  // Restricts to the given countries (NTC entries between kept countries only).
  Dataset subset(const std::vector<CountryCode>& keep) const {
    std::vector<HourlySeries> cut;
    for (const auto& c : keep)
      for (const HourlySeries* s : country(c).all()) cut.push_back(*s);
    Dataset d = from_series(cut);
    const std::set<CountryCode> k(keep.begin(), keep.end());
    for (const auto& [pair, gw] : ntc_.entries())
      if (k.count(pair.first) && k.count(pair.second)) d.ntc_.set(pair.first, pair.second, gw);
    for (const auto& [c, v] : bio_cap_)
      if (k.count(c)) d.bio_cap_[c] = v;
    return d;
  }

  void validate() const {
    const HourlySeries* ref = nullptr;
    for (const auto& [c, p] : profiles_) {
      if (!p.load) fail(ErrorKind::alignment, c + ": no electric load series");
      for (const HourlySeries* s : p.all()) {
        if (ref && !ref->aligned_with(*s))
          fail(ErrorKind::alignment, c + " " + to_string(s->quantity()) + " is not aligned with " +
                                         ref->country() + " " + to_string(ref->quantity()));
        ref = s;
      }
      if (!p.heat.empty() && !p.cops.aligned_with(p.heat))
        fail(ErrorKind::alignment, c + ": COP series not aligned with heat demand");
    }
  }

 private:
  CountryProfiles& profiles_for(const CountryCode& c) {
    auto it = profiles_.find(c);
    if (it == profiles_.end()) it = profiles_.emplace(c, CountryProfiles(c)).first;
    return it->second;
  }

  std::map<CountryCode, CountryProfiles> profiles_;
  NtcMatrix ntc_;
  std::map<CountryCode, double> bio_cap_;
};

// NTC file: "from,to,MW" rows; stored in GW.
inline void read_ntc_csv(std::istream& in, NtcMatrix& ntc, const std::string& source = "<ntc>") {
  std::string line;
  std::getline(in, line);
  if (detail::trim(line) != "from,to,MW") fail(ErrorKind::bad_header, source + ": expected header 'from,to,MW'");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto f = detail::split(detail::trim(line), ',');
    if (f.size() != 3) fail(ErrorKind::malformed_row, source + ":" + std::to_string(line_no) + ": expected 3 fields");
    double mw = 0.0;
    auto v = detail::trim(f[2]);
    auto r = std::from_chars(v.data(), v.data() + v.size(), mw);
    if (r.ec != std::errc{}) fail(ErrorKind::malformed_row, source + ":" + std::to_string(line_no) + ": bad MW value");
    ntc.set(std::string(detail::trim(f[0])), std::string(detail::trim(f[1])), mw / 1000.0);
  }
}

inline void write_ntc_csv(std::ostream& out, const NtcMatrix& ntc) {
  out << "from,to,MW\n";
  for (const auto& [pair, gw] : ntc.entries())
    out << pair.first << ',' << pair.second << ',' << format_number(gw * 1000.0) << '\n';
}

// Bioenergy caps file: "country,GWh_per_year".
inline void read_bio_caps_csv(std::istream& in, std::map<CountryCode, double>& caps, const std::string& source) {
  std::string line;
  std::getline(in, line);
  if (detail::trim(line) != "country,GWh_per_year")
    fail(ErrorKind::bad_header, source + ": expected header 'country,GWh_per_year'");
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto f = detail::split(detail::trim(line), ',');
    if (f.size() != 2) fail(ErrorKind::malformed_row, source + ": expected 2 fields");
    double v = 0.0;
    auto t = detail::trim(f[1]);
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc{} || v < 0.0) fail(ErrorKind::malformed_row, source + ": bad cap value");
    caps[std::string(detail::trim(f[0]))] = v;
  }
}

inline void write_bio_caps_csv(std::ostream& out, const std::map<CountryCode, double>& caps) {
  out << "country,GWh_per_year\n";
  for (const auto& [c, v] : caps) out << c << ',' << format_number(v) << '\n';
}

}  // namespace hpflex
