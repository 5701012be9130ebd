#include "azb/rep_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "azb/errors.hpp"

namespace azb {

namespace {

void put_double(std::string& buf, double x) {
  char tmp[32];
  const auto res = std::to_chars(tmp, tmp + sizeof tmp, x);
  buf.append(tmp, res.ptr);
}

double parse_double(std::string_view field) {
  double x = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), x);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw FormatError("load_rep: bad number '" + std::string(field) + "'");
  }
  return x;
}

}  // namespace

void save_rep(const Representation& rep, std::ostream& out) {
  nlohmann::json header = {{"format_version", kRepFormatVersion},
                           {"q", rep.grid.q()},
                           {"M", rep.grid.order()},
                           {"d", rep.h_dim}};
  out << header.dump() << '\n';
  std::string line;
  for (Index r = 0; r < rep.u.rows(); ++r) {
    line.clear();
    for (Index c = 0; c < rep.u.cols(); ++c) {
      if (c > 0) line.push_back(',');
      put_double(line, rep.u(r, c).real());
      line.push_back(',');
      put_double(line, rep.u(r, c).imag());
    }
    out << line << '\n';
  }
  if (!out) throw FormatError("save_rep: write failed");
}

void save_rep(const Representation& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("save_rep: cannot open " + path);
  save_rep(rep, out);
}

Representation load_rep(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("load_rep: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("load_rep: bad header: ") + e.what());
  }
  if (!header.is_object() || header.value("format_version", 0) != kRepFormatVersion || !header.contains("q") ||
      !header.contains("M") || !header.contains("d")) {
    throw FormatError("load_rep: unsupported header");
  }
  const double q = header["q"].get<double>();
  const int m = header["M"].get<int>();
  const Index d = header["d"].get<Index>();
  GammaGrid grid(q, m);
  if (d < 1) throw FormatError("load_rep: d must be positive");
  const Index n = d * grid.size();

  Matrix u(n, n);
  for (Index r = 0; r < n; ++r) {
    if (!std::getline(in, line)) throw FormatError("load_rep: truncated matrix");
    std::string_view rest(line);
    for (Index c = 0; c < 2 * n; ++c) {
      const auto comma = rest.find(',');
      const bool last = c == 2 * n - 1;
      if (last != (comma == std::string_view::npos)) throw FormatError("load_rep: wrong column count");
      const double x = parse_double(rest.substr(0, comma));
      if (c % 2 == 0) {
        u(r, c / 2).real(x);
      } else {
        u(r, c / 2).imag(x);
      }
      if (!last) rest.remove_prefix(comma + 1);
    }
  }
  return {std::move(u), grid, d, std::nullopt};
}

Representation load_rep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("load_rep: cannot open " + path);
  return load_rep(in);
}

}  // namespace azb
