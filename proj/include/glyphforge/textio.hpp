#pragma once

// Headered text formats for numeric inputs exchanged with the CLI.
//
//   #glyphforge-feat v1      feature matrix
//   <rows> <cols>
//   <row-major values, any whitespace>
//
//   #glyphforge-gmm v1       raw mixture-head output
//   <6M values for step 1>
//   <6M values for step 2>   one step per line, same M on every line
//
//   #glyphforge-ifr v1       IFR weight bundle
//   <name> <rows> <cols>     name in {q_img, k_img, k_seq, v_seq, ln_gain, ln_bias}
//   <row-major values>
//   ...
//
// After the header, lines starting with '#' are comments.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/error.hpp"
#include "glyphforge/format6.hpp"
#include "glyphforge/gmm.hpp"
#include "glyphforge/ifr.hpp"
#include "glyphforge/matrix.hpp"

namespace glyphforge {

inline constexpr std::string_view kFeatureHeader = "#glyphforge-feat v1";
inline constexpr std::string_view kGmmHeader = "#glyphforge-gmm v1";
inline constexpr std::string_view kIfrHeader = "#glyphforge-ifr v1";

namespace detail {

struct Token {
  std::string_view text;
  std::size_t line;
};

/// Checks the header and returns all remaining tokens with their line numbers.
inline std::vector<Token> tokenize_body(std::string_view text, std::string_view header) {
  std::vector<Token> out;
  bool header_seen = false;
  for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    if (!header_seen) {
      if (line != header) throw Error(ErrorKind::MalformedLine, "expected header '" + std::string(header) + "'", lineno);
      header_seen = true;
      return;
    }
    if (!line.empty() && line.front() == '#') return;
    for (auto f : split_fields(line)) out.push_back({f, lineno});
  });
  if (!header_seen) throw Error(ErrorKind::MalformedLine, "empty input, missing header", 1);
  return out;
}

class TokenReader {
 public:
  explicit TokenReader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const noexcept { return pos_ >= tokens_.size(); }

  const Token& next() {
    if (done()) throw Error(ErrorKind::MalformedLine, "unexpected end of input", last_line());
    return tokens_[pos_++];
  }

  double number() {
    const auto& t = next();
    double v = 0.0;
    if (!parse_double(t.text, v)) throw Error(ErrorKind::MalformedLine, "non-numeric value '" + std::string(t.text) + "'", t.line);
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "non-finite value", t.line);
    return v;
  }

  std::size_t count() {
    const auto& t = next();
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      throw Error(ErrorKind::MalformedLine, "expected a count, got '" + std::string(t.text) + "'", t.line);
    }
    return v;
  }

  Matrix matrix(std::size_t rows, std::size_t cols) {
    std::vector<double> v(rows * cols);
    for (double& x : v) x = number();
    return Matrix(rows, cols, std::move(v));
  }

  std::size_t last_line() const noexcept { return tokens_.empty() ? 1 : tokens_.back().line; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

inline void append_row(std::string& out, std::span<const double> row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) out += ' ';
    out += format_double(row[k]);
  }
  out += '\n';
}

inline void append_matrix(std::string& out, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) append_row(out, m.row(r));
}

}  // namespace detail

inline Matrix parse_feature_matrix(std::string_view text) {
  detail::TokenReader in(detail::tokenize_body(text, kFeatureHeader));
  const std::size_t rows = in.count();
  const std::size_t cols = in.count();
  Matrix m = in.matrix(rows, cols);
  if (!in.done()) throw Error(ErrorKind::MalformedLine, "trailing values after matrix", in.next().line);
  return m;
}

inline std::string serialize_feature_matrix(const Matrix& m) {
  std::string out(kFeatureHeader);
  out += '\n' + std::to_string(m.rows()) + ' ' + std::to_string(m.cols()) + '\n';
  detail::append_matrix(out, m);
  return out;
}

inline std::vector<RawGmmOutput> parse_gmm_raw(std::string_view text) {
  std::vector<RawGmmOutput> steps;
  bool header_seen = false;
  detail::for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    if (!header_seen) {
      if (line != kGmmHeader) throw Error(ErrorKind::MalformedLine, "expected header '" + std::string(kGmmHeader) + "'", lineno);
      header_seen = true;
      return;
    }
    if (detail::is_blank(line) || line.front() == '#') return;
    RawGmmOutput step;
    for (auto f : detail::split_fields(line)) {
      double v = 0.0;
      if (!detail::parse_double(f, v)) throw Error(ErrorKind::MalformedLine, "non-numeric value '" + std::string(f) + "'", lineno);
      step.values.push_back(v);
    }
    if (step.values.size() % 6 != 0) {
      throw Error(ErrorKind::MalformedLine, "step has " + std::to_string(step.values.size()) + " values, not 6M", lineno);
    }
    if (!steps.empty() && steps.front().values.size() != step.values.size()) {
      throw Error(ErrorKind::MalformedLine, "component count changes between steps", lineno);
    }
    steps.push_back(std::move(step));
  });
  if (!header_seen) throw Error(ErrorKind::MalformedLine, "empty input, missing header", 1);
  return steps;
}

inline std::string serialize_gmm_raw(const std::vector<RawGmmOutput>& steps) {
  std::string out(kGmmHeader);
  out += '\n';
  for (const auto& s : steps) detail::append_row(out, s.values);
  return out;
}

inline IfrWeights parse_ifr_weights(std::string_view text) {
  detail::TokenReader in(detail::tokenize_body(text, kIfrHeader));
  std::map<std::string, Matrix, std::less<>> mats;
  while (!in.done()) {
    const auto& name = in.next();
    const std::size_t rows = in.count();
    const std::size_t cols = in.count();
    if (!mats.emplace(std::string(name.text), in.matrix(rows, cols)).second) {
      throw Error(ErrorKind::MalformedLine, "duplicate matrix '" + std::string(name.text) + "'", name.line);
    }
  }
  IfrWeights w;
  auto take = [&](std::string_view key, Matrix& dst) {
    const auto it = mats.find(key);
    if (it == mats.end()) throw Error(ErrorKind::ShapeMismatch, "IFR bundle lacks '" + std::string(key) + "'");
    dst = std::move(it->second);
    mats.erase(it);
  };
  take("q_img", w.q_img);
  take("k_img", w.k_img);
  take("k_seq", w.k_seq);
  take("v_seq", w.v_seq);
  for (auto [key, dst] : {std::pair{"ln_gain", &w.ln_gain}, std::pair{"ln_bias", &w.ln_bias}}) {
    const auto it = mats.find(key);
    if (it == mats.end()) continue;
    dst->assign(it->second.values().begin(), it->second.values().end());
    mats.erase(it);
  }
  if (!mats.empty()) throw Error(ErrorKind::ShapeMismatch, "unknown matrix '" + mats.begin()->first + "' in IFR bundle");
  return w;
}

inline std::string serialize_ifr_weights(const IfrWeights& w) {
  std::string out(kIfrHeader);
  out += '\n';
  auto put = [&](std::string_view name, const Matrix& m) {
    out += std::string(name) + ' ' + std::to_string(m.rows()) + ' ' + std::to_string(m.cols()) + '\n';
    detail::append_matrix(out, m);
  };
  put("q_img", w.q_img);
  put("k_img", w.k_img);
  put("k_seq", w.k_seq);
  put("v_seq", w.v_seq);
  if (!w.ln_gain.empty()) put("ln_gain", Matrix(1, w.ln_gain.size(), w.ln_gain));
  if (!w.ln_bias.empty()) put("ln_bias", Matrix(1, w.ln_bias.size(), w.ln_bias));
  return out;
}

/// key=value lines; '#' starts a comment line; whitespace around key and
/// value is trimmed. Later keys override earlier ones.
inline std::map<std::string, std::string, std::less<>> parse_key_values(std::string_view text) {
  std::map<std::string, std::string, std::less<>> out;
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
  };
  detail::for_each_line(text, [&](std::size_t lineno, std::string_view line) {
    line = trim(line);
    if (line.empty() || line.front() == '#') return;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::MalformedLine, "expected key=value", lineno);
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::MalformedLine, "empty key", lineno);
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  });
  return out;
}

}  // namespace glyphforge
