#ifndef RCFE_IO_HPP
#define RCFE_IO_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rcfe/channel.hpp"
#include "rcfe/phase.hpp"

namespace rcfe {

const char* version_string();

/// Channel spec document: UTF-8 text, one `key: values` entry per line,
/// `#` comments. Keys: input_alphabet, output_alphabet, P_X, and one `W:`
/// line per input letter (rows in input order). Example:
///
///   input_alphabet: 0 1
///   output_alphabet: 0 1
///   P_X: 0.5 0.5
///   W: 1.0 0.0
///   W: 0.45 0.55
Channel parse_channel_spec(std::istream& in);
Channel load_channel(const std::string& path);

// 12 significant digits, '.' decimal point, locale-independent.
std::string format_sig(double value);

void write_text_atomic(const std::string& path, const std::string& content);

// CSV (header row, 12 significant digits) plus a `<path>.meta` sidecar with
// the channel hash, solver config, seed and tool version.
void write_curve_csv(const std::string& path, const CurveTable& table);

/// Ordered key/value document; rendering preserves insertion order so
/// identical runs serialize identically.
struct KeyValueDoc {
  std::vector<std::pair<std::string, std::string>> entries;
  void add(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
  }
  std::string render() const;
};

void write_manifest(const std::string& path, const KeyValueDoc& manifest);

}  // namespace rcfe

#endif  // RCFE_IO_HPP
