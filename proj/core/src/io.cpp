#include "ess/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "ess/errors.hpp"

namespace ess {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      cfg.problems_.push_back("line " + std::to_string(lineno) +
                              ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      cfg.problems_.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (cfg.values_.count(key))
      cfg.problems_.push_back("duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::int64_t v = 0;
  const auto& s = it->second;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    problems_.push_back("key '" + key + "': not an integer: '" + s + "'");
    return fallback;
  }
  return v;
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key, std::uint64_t fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::uint64_t v = 0;
  const auto& s = it->second;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    problems_.push_back("key '" + key + "': not a non-negative integer: '" + s + "'");
    return fallback;
  }
  return v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    problems_.push_back("key '" + key + "': not a number: '" + it->second + "'");
    return fallback;
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  problems_.push_back("key '" + key + "': expected on/off: '" + it->second + "'");
  return fallback;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) {
  std::vector<double> out;
  const auto it = values_.find(key);
  if (it == values_.end()) return out;
  std::string item;
  std::istringstream ss(it->second);
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(trim(item)));
    } catch (const std::exception&) {
      problems_.push_back("key '" + key + "': not a number: '" + trim(item) + "'");
    }
  }
  return out;
}

void KeyValueConfig::require(const std::string& key) {
  if (!values_.count(key)) problems_.push_back("missing required key '" + key + "'");
}

void KeyValueConfig::restrict_keys(const std::vector<std::string>& allowed) {
  for (const auto& [key, value] : values_) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      problems_.push_back("unknown key '" + key + "'");
  }
}

void KeyValueConfig::finish() const {
  if (!problems_.empty()) throw ConfigError(problems_);
}

std::string TrellisParams::to_config_text() const {
  std::ostringstream out;
  out << "m = " << m << '\n';
  out << "n = " << block_length << '\n';
  out << "emax = " << max_energy << '\n';
  out << "precision = " << (precision.is_bounded() ? "bounded" : "full") << '\n';
  if (precision.is_bounded()) {
    out << "mantissa_bits = " << precision.mantissa_bits << '\n';
    out << "exponent_bits = " << precision.exponent_bits << '\n';
  }
  return out.str();
}

TrellisParams TrellisParams::from_config(KeyValueConfig& cfg) {
  TrellisParams p;
  cfg.require("m");
  cfg.require("n");
  cfg.require("emax");
  p.m = static_cast<int>(cfg.get_int("m", 3));
  p.block_length = static_cast<int>(cfg.get_int("n", 4));
  p.max_energy = cfg.get_int("emax", 28);
  const std::string precision = cfg.get_string("precision", "full");
  if (precision == "bounded") {
    p.precision = Precision::bounded(static_cast<int>(cfg.get_int("mantissa_bits", 0)),
                                     static_cast<int>(cfg.get_int("exponent_bits", 0)));
    cfg.require("mantissa_bits");
    cfg.require("exponent_bits");
  } else if (precision != "full") {
    cfg.note_problem("precision must be 'full' or 'bounded'");
  }
  return p;
}

SimulationSpec parse_simulation_spec(std::istream& in) {
  KeyValueConfig cfg = KeyValueConfig::parse(in);
  cfg.restrict_keys({"scheme", "m", "n", "emax", "blocks_per_frame", "code_rate",
                     "termination", "precision", "mantissa_bits", "exponent_bits",
                     "snr_db", "max_frames", "target_errors", "seed", "threads"});

  SimulationSpec spec;
  spec.pas.scheme = cfg.get_string("scheme", "ess");
  spec.pas.m = static_cast<int>(cfg.get_int("m", 3));
  spec.pas.shaping_length = static_cast<int>(cfg.get_int("n", 96));
  spec.pas.max_energy = cfg.get_int("emax", 1120);
  spec.pas.blocks_per_frame = static_cast<int>(cfg.get_int("blocks_per_frame", 8));

  const std::string rate = cfg.get_string("code_rate", "5/6");
  const auto slash = rate.find('/');
  if (slash == std::string::npos) {
    cfg.note_problem("code_rate must look like '5/6'");
  } else {
    try {
      spec.pas.code_rate_num = std::stoi(rate.substr(0, slash));
      spec.pas.code_rate_den = std::stoi(rate.substr(slash + 1));
    } catch (const std::exception&) {
      cfg.note_problem("code_rate must look like '5/6'");
    }
  }

  spec.pas.termination = cfg.get_bool("termination", true);
  const std::string precision = cfg.get_string("precision", "full");
  if (precision == "bounded") {
    spec.pas.precision =
        Precision::bounded(static_cast<int>(cfg.get_int("mantissa_bits", 0)),
                           static_cast<int>(cfg.get_int("exponent_bits", 0)));
  } else if (precision != "full") {
    cfg.note_problem("precision must be 'full' or 'bounded'");
  }
  spec.pas.seed = cfg.get_uint("seed", 1);
  spec.pas.threads = static_cast<int>(cfg.get_int("threads", 1));

  cfg.require("snr_db");
  spec.fer.snr_db = cfg.get_double_list("snr_db");
  if (spec.fer.snr_db.empty()) cfg.note_problem("snr_db list is empty");
  spec.fer.max_frames = cfg.get_uint("max_frames", 100000);
  spec.fer.target_errors = cfg.get_uint("target_errors", 100);
  if (spec.fer.max_frames == 0) cfg.note_problem("max_frames must be >= 1");

  try {
    spec.pas.validate();
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) cfg.note_problem(p);
  }
  cfg.finish();
  return spec;
}

std::vector<BigInt> read_hex_blocks(std::istream& in, int bits_per_block) {
  std::vector<BigInt> blocks;
  const BigInt limit = pow2(bits_per_block);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty()) continue;
    BigInt v = 0;
    for (char c : s) {
      int digit;
      if (c >= '0' && c <= '9')
        digit = c - '0';
      else if (c >= 'a' && c <= 'f')
        digit = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F')
        digit = c - 'A' + 10;
      else
        throw InvalidSequenceError("line " + std::to_string(lineno) +
                                   ": invalid hex digit '" + std::string(1, c) + "'");
      v = (v << 4) | digit;
    }
    if (v >= limit)
      throw InvalidSequenceError("line " + std::to_string(lineno) +
                                 ": value does not fit in " +
                                 std::to_string(bits_per_block) + " bits");
    blocks.push_back(std::move(v));
  }
  return blocks;
}

void write_hex_blocks(std::ostream& out, const std::vector<BigInt>& blocks,
                      int bits_per_block) {
  const int digits = (bits_per_block + 3) / 4;
  for (const auto& b : blocks) {
    if (bit_length(b) > static_cast<std::size_t>(bits_per_block))
      throw ParameterError("block value does not fit in " +
                           std::to_string(bits_per_block) + " bits");
    std::string s;
    BigInt v = b;
    for (int i = 0; i < digits; ++i) {
      const int d = static_cast<int>(v & 0xf);
      s.push_back("0123456789abcdef"[d]);
      v >>= 4;
    }
    std::reverse(s.begin(), s.end());
    out << s << '\n';
  }
}

std::vector<std::vector<int>> read_amplitude_lines(std::istream& in) {
  std::vector<std::vector<int>> sequences;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty()) continue;
    std::vector<int> seq;
    std::istringstream ss(s);
    std::string token;
    while (ss >> token) {
      try {
        std::size_t pos = 0;
        const int v = std::stoi(token, &pos);
        if (pos != token.size()) throw std::invalid_argument("trailing");
        seq.push_back(v);
      } catch (const std::exception&) {
        throw InvalidSequenceError("line " + std::to_string(lineno) +
                                   ": invalid amplitude '" + token + "'");
      }
    }
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

void write_amplitude_lines(std::ostream& out,
                           const std::vector<std::vector<int>>& sequences) {
  for (const auto& seq : sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out << ' ';
      out << seq[i];
    }
    out << '\n';
  }
}

std::string format_sig(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

}  // namespace ess
