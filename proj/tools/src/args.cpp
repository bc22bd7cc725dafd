#include "qcorr/cli/args.hpp"

#include <charconv>
#include <cmath>

#include "qcorr/error.hpp"
#include "qcorr/portrait.hpp"

namespace qcorr::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto at = s.find(sep, start);
    out.push_back(s.substr(start, at == std::string::npos ? at : at - start));
    if (at == std::string::npos) return out;
    start = at + 1;
  }
}

double number(const std::string& s) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (first == last || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("not a number: '" + s + "'", 0);
  }
  return v;
}

int integer(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("not an integer: '" + s + "'", 0);
  }
  return v;
}

// Exponent k with 10^-k == v, or throws.
int decade(const std::string& s) {
  const double v = number(s);
  const double k = -std::log10(v);
  if (!(v > 0.0) || std::abs(k - std::round(k)) > 1e-9) {
    throw ParseError("level range ends must be powers of ten, got '" + s + "'", 0);
  }
  return static_cast<int>(std::lround(k));
}

}  // namespace

std::vector<double> parse_levels(const std::string& text) {
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int a = decade(text.substr(0, dots));
    const int b = decade(text.substr(dots + 2));
    if (a < 1 || b < a) throw ParseError("level range must run from larger to smaller decades", 0);
    return portrait::decade_levels(a, b);
  }
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(number(item));
  return out;
}

jordan::Region parse_region(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw ParseError("region needs re_min,re_max,im_min,im_max", 0);
  return {number(parts[0]), number(parts[1]), number(parts[2]), number(parts[3])};
}

std::vector<int> parse_deltas(const std::string& text) {
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    return jordan::delta_range(integer(text.substr(0, colon)), integer(text.substr(colon + 1)));
  }
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(integer(item));
  return out;
}

jordan::Policy parse_policy(const std::string& text) {
  if (text == "same" || text == "1") return jordan::Policy::SameLevel;
  if (text == "higher" || text == "2") return jordan::Policy::HigherLevel;
  if (text == "adaptive" || text == "3") return jordan::Policy::SameUnlessHallucinating;
  throw ParseError("unknown policy '" + text + "' (same, higher, adaptive)", 0);
}

numkernel::Complex parse_complex(const std::string& text) {
  if (text.empty() || text.back() != 'i') return {number(text), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  // The sign that starts the imaginary part: last +/- not at the front and
  // not part of an exponent.
  std::size_t cut = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  const auto imag = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return number(s);
  };
  if (cut == std::string::npos) return {0.0, imag(body)};
  return {number(body.substr(0, cut)), imag(body.substr(cut))};
}

std::vector<numkernel::Root> parse_roots(const std::string& text) {
  std::vector<numkernel::Root> out;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.rfind(':');
    numkernel::Root r;
    r.value = parse_complex(item.substr(0, colon));
    r.multiplicity = colon == std::string::npos ? 1 : integer(item.substr(colon + 1));
    if (r.multiplicity < 1) throw ParseError("multiplicity must be >= 1 in '" + item + "'", 0);
    out.push_back(r);
  }
  return out;
}

std::vector<numkernel::JordanBlockSpec> parse_blocks(const std::string& text) {
  std::vector<numkernel::JordanBlockSpec> out;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw ParseError("block '" + item + "' needs lambda:rho", 0);
    numkernel::JordanBlockSpec b;
    b.lambda = parse_complex(item.substr(0, colon));
    b.rho = integer(item.substr(colon + 1));
    if (b.rho < 1) throw ParseError("block size must be >= 1 in '" + item + "'", 0);
    out.push_back(b);
  }
  return out;
}

}  // namespace qcorr::cli
