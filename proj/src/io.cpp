#include "rcfe/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rcfe {

const char* version_string() { return "rcfe 0.1.0"; }

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const char* context) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ValidationError(std::string("channel spec: bad number '") + tok +
                          "' in " + context);
  }
  return v;
}

}  // namespace

Channel parse_channel_spec(std::istream& in) {
  std::vector<std::string> input_alphabet;
  std::vector<std::string> output_alphabet;
  std::vector<double> px;
  std::vector<std::vector<double>> rows;

  std::string line;
  while (std::getline(in, line)) {
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ValidationError("channel spec: expected 'key: values' in line '" +
                            line + "'");
    }
    const std::string key = trim(line.substr(0, colon));
    const std::string rest = trim(line.substr(colon + 1));
    if (key == "input_alphabet") {
      input_alphabet = split_ws(rest);
    } else if (key == "output_alphabet") {
      output_alphabet = split_ws(rest);
    } else if (key == "P_X") {
      for (const auto& tok : split_ws(rest)) {
        px.push_back(parse_double(tok, "P_X"));
      }
    } else if (key == "W") {
      std::vector<double> row;
      for (const auto& tok : split_ws(rest)) {
        row.push_back(parse_double(tok, "W"));
      }
      rows.push_back(std::move(row));
    } else {
      throw ValidationError("channel spec: unknown key '" + key + "'");
    }
  }

  if (input_alphabet.empty() || output_alphabet.empty()) {
    throw ValidationError("channel spec: missing alphabet declarations");
  }
  if (px.size() != input_alphabet.size()) {
    throw ValidationError("channel spec: P_X length != input alphabet size");
  }
  if (rows.size() != input_alphabet.size()) {
    throw ValidationError("channel spec: W row count != input alphabet size");
  }
  Matrix w(static_cast<Index>(rows.size()),
           static_cast<Index>(output_alphabet.size()));
  for (std::size_t x = 0; x < rows.size(); ++x) {
    if (rows[x].size() != output_alphabet.size()) {
      throw ValidationError("channel spec: W row length != output alphabet");
    }
    for (std::size_t y = 0; y < rows[x].size(); ++y) {
      w(static_cast<Index>(x), static_cast<Index>(y)) = rows[x][y];
    }
  }
  Vector p(static_cast<Index>(px.size()));
  for (std::size_t i = 0; i < px.size(); ++i) {
    p[static_cast<Index>(i)] = px[i];
  }
  return Channel::make(std::move(w), std::move(p), std::move(input_alphabet),
                       std::move(output_alphabet));
}

Channel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("channel spec: cannot open '" + path + "'");
  }
  return parse_channel_spec(in);
}

std::string format_sig(double value) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + tmp + "'");
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ValidationError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

void write_curve_csv(const std::string& path, const CurveTable& table) {
  std::ostringstream csv;
  csv << table.axis_name;
  for (const auto& name : table.column_names) csv << "," << name;
  csv << "\n";
  for (std::size_t i = 0; i < table.axis.size(); ++i) {
    csv << format_sig(table.axis[i]);
    for (const auto& column : table.columns) {
      csv << "," << format_sig(column[i]);
    }
    csv << "\n";
  }
  write_text_atomic(path, csv.str());

  KeyValueDoc meta;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(table.channel_hash));
  meta.add("channel_hash", hash_hex);
  meta.add("solver_config", table.config_summary);
  meta.add("seed", std::to_string(table.seed));
  meta.add("version", version_string());
  std::string cols = table.axis_name;
  for (const auto& name : table.column_names) cols += "," + name;
  meta.add("columns", cols);
  write_text_atomic(path + ".meta", meta.render());
}

std::string KeyValueDoc::render() const {
  std::ostringstream os;
  for (const auto& [key, value] : entries) {
    os << key << ": " << value << "\n";
  }
  return os.str();
}

void write_manifest(const std::string& path, const KeyValueDoc& manifest) {
  write_text_atomic(path, manifest.render());
}

}  // namespace rcfe
