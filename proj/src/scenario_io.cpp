#include "hta/scenario_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hta {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

using Section = std::map<std::string, Entry>;

struct RawFile {
  std::string name;
  std::vector<std::pair<std::string, Section>> sections;  // in file order
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const RawFile& f, int line, const std::string& msg) {
  std::ostringstream os;
  os << f.name << ":" << line << ": " << msg;
  throw std::invalid_argument(os.str());
}

RawFile read_raw(std::istream& in, const std::string& name) {
  RawFile f;
  f.name = name;
  Section* current = nullptr;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(f, lineno, "unterminated section header");
      f.sections.emplace_back(trim(line.substr(1, line.size() - 2)), Section{});
      current = &f.sections.back().second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(f, lineno, "expected key = value");
    if (!current) fail(f, lineno, "key outside any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(f, lineno, "empty key");
    if (!current->emplace(key, Entry{value, lineno}).second)
      fail(f, lineno, "duplicate key '" + key + "'");
  }
  return f;
}

class SectionReader {
 public:
  SectionReader(const RawFile& f, const std::string& name, const Section& s)
      : file_(f), name_(name), section_(s) {}

  bool has(const std::string& key) const { return section_.count(key) > 0; }

  double number(const std::string& key) const {
    const Entry& e = entry(key);
    try {
      size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      fail(file_, e.line, name_ + "." + key + ": not a number: '" + e.value + "'");
    }
  }

  std::string text(const std::string& key) const { return entry(key).value; }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> items;
    std::stringstream ss(entry(key).value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) items.push_back(item);
    }
    return items;
  }

  // Exactly one of two unit spellings, converted to SI.
  double converted(const std::string& si_key, const std::string& alt_key,
                   double alt_scale) const {
    const bool a = has(si_key), b = has(alt_key);
    if (a && b)
      fail(file_, entry(alt_key).line, name_ + ": give either " + si_key + " or " + alt_key);
    if (a) return number(si_key);
    if (b) return number(alt_key) * alt_scale;
    missing(si_key);
  }

  [[noreturn]] void missing(const std::string& key) const {
    throw std::invalid_argument(file_.name + ": missing " + name_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, e] : section_)
      if (!e.used) fail(file_, e.line, name_ + "." + key + ": unknown key");
  }

 private:
  const Entry& entry(const std::string& key) const {
    const auto it = section_.find(key);
    if (it == section_.end()) missing(key);
    it->second.used = true;
    return it->second;
  }

  const RawFile& file_;
  std::string name_;
  const Section& section_;
};

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& name) {
  const RawFile raw = read_raw(in, name);
  Scenario s;
  bool have_radio = false, have_levels = false;
  std::vector<std::string> class_names;

  for (const auto& [section_name, section] : raw.sections) {
    if (section_name == "radio") {
      SectionReader r(raw, "radio", section);
      s.radio.bandwidth_hz = r.converted("bandwidth_hz", "bandwidth_mhz", 1e6);
      s.radio.period_s = r.converted("period_s", "period_ms", 1e-3);
      if (r.has("noise_dbm"))
        s.radio.noise_w = std::pow(10.0, r.number("noise_dbm") / 10.0) * 1e-3;
      else
        s.radio.noise_w = r.number("noise_w");
      s.radio.epsilon = r.number("epsilon");
      r.finish();
      have_radio = true;
    } else if (section_name.rfind("type.", 0) == 0) {
      DeviceClass cls;
      cls.name = section_name.substr(5);
      SectionReader r(raw, section_name, section);
      const std::string kind = r.text("kind");
      if (kind == "mtd") {
        cls.type.kind = DeviceKind::Mtd;
        cls.type.packet_bits = r.converted("packet_bits", "packet_bytes", 8.0);
        cls.type.deadline_s = r.converted("deadline_s", "deadline_ms", 1e-3);
      } else if (kind == "htd") {
        cls.type.kind = DeviceKind::Htd;
        cls.type.energy_budget_j = r.converted("energy_budget_j", "energy_budget_uj", 1e-6);
        if (r.has("qos_floor_fraction")) cls.htd_qos_floor = r.number("qos_floor_fraction");
      } else {
        r.missing("kind (must be 'mtd' or 'htd')");
      }
      cls.type.power_w = r.number("power_w");
      cls.type.channel_variance = r.number("channel_variance");
      cls.proportion = r.number("proportion");
      r.finish();
      class_names.push_back(cls.name);
      s.classes.push_back(std::move(cls));
    } else if (section_name == "levels") {
      SectionReader r(raw, "levels", section);
      s.levels.poisson_rate = r.number("poisson_rate");
      if (r.has("quantization_bins"))
        s.quantization_bins = static_cast<int>(r.number("quantization_bins"));
      const auto order = r.list("order");
      s.levels.class_of_level.clear();
      for (const auto& nm : order) {
        int idx = -1;
        for (size_t c = 0; c < class_names.size(); ++c)
          if (class_names[c] == nm) idx = static_cast<int>(c);
        if (idx < 0)
          throw std::invalid_argument(raw.name + ": levels.order: unknown type '" + nm + "'");
        s.levels.class_of_level.push_back(idx);
      }
      s.levels.max_level = static_cast<int>(s.levels.class_of_level.size()) - 1;
      r.finish();
      have_levels = true;
    } else if (section_name == "sweep-defaults") {
      SectionReader r(raw, "sweep-defaults", section);
      const auto parse_num = [&](const std::string& v, const char* key) {
        try {
          size_t pos = 0;
          const double d = std::stod(v, &pos);
          if (pos != v.size()) throw std::invalid_argument("trailing characters");
          return d;
        } catch (const std::exception&) {
          throw std::invalid_argument(raw.name + ": sweep-defaults." + key +
                                      ": not a number: '" + v + "'");
        }
      };
      for (const auto& v : r.list("sizes"))
        s.sweep.sizes.push_back(static_cast<int>(parse_num(v, "sizes")));
      for (const auto& v : r.list("mu_multipliers"))
        s.sweep.mu_multipliers.push_back(parse_num(v, "mu_multipliers"));
      s.sweep.samples = static_cast<int>(r.number("samples"));
      s.sweep.seed = static_cast<std::uint64_t>(r.number("seed"));
      s.sweep.solvers = r.list("solvers");
      r.finish();
    } else {
      throw std::invalid_argument(raw.name + ": unknown section [" + section_name + "]");
    }
  }

  if (!have_radio) throw std::invalid_argument(raw.name + ": missing [radio] section");
  if (s.classes.empty()) throw std::invalid_argument(raw.name + ": no [type.*] sections");
  if (!have_levels) throw std::invalid_argument(raw.name + ": missing [levels] section");

  // mtd_top_level follows from the level order: last MTD level.
  s.levels.mtd_top_level = 0;
  for (size_t lvl = 0; lvl < s.levels.class_of_level.size(); ++lvl)
    if (s.classes[s.levels.class_of_level[lvl]].type.kind == DeviceKind::Mtd)
      s.levels.mtd_top_level = static_cast<int>(lvl);

  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(path + ": cannot open scenario file");
  return parse_scenario(in, path);
}

}  // namespace hta
