#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ess/bigint.hpp"
#include "ess/pas.hpp"
#include "ess/trellis.hpp"

namespace ess {

inline constexpr const char* kVersion = "0.1.0";

// 'key = value' configuration text, one pair per line, '#' comments.
// Typed getters record problems instead of throwing so that every
// violation is reported at once.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);  // on/off, true/false, 1/0
  std::vector<double> get_double_list(const std::string& key);

  void require(const std::string& key);
  void restrict_keys(const std::vector<std::string>& allowed);
  void note_problem(std::string problem) { problems_.push_back(std::move(problem)); }

  const std::vector<std::string>& problems() const { return problems_; }
  // Throws ConfigError when any problem was recorded.
  void finish() const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> problems_;
};

// Structural trellis parameters as exchanged through config text.
struct TrellisParams {
  int m = 3;
  int block_length = 4;
  long long max_energy = 28;
  Precision precision = Precision::full();

  std::string to_config_text() const;
  static TrellisParams from_config(KeyValueConfig& cfg);
};

// A full Monte Carlo run description: link configuration plus scan.
struct SimulationSpec {
  PASConfig pas;
  FerOptions fer;
};
SimulationSpec parse_simulation_spec(std::istream& in);

// Shaper input blocks: one k-bit block per line as hex text, MSB first,
// zero-padded to ceil(k/4) digits.
std::vector<BigInt> read_hex_blocks(std::istream& in, int bits_per_block);
void write_hex_blocks(std::ostream& out, const std::vector<BigInt>& blocks,
                      int bits_per_block);

// Amplitude sequences: space-separated decimal integers, one sequence
// per line.
std::vector<std::vector<int>> read_amplitude_lines(std::istream& in);
void write_amplitude_lines(std::ostream& out,
                           const std::vector<std::vector<int>>& sequences);

// Numeric formatting used by every CSV surface: six significant digits.
std::string format_sig(double value, int digits = 6);

}  // namespace ess
