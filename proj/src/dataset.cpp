#include "causal_boot/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "causal_boot/errors.hpp"
#include "text.hpp"

namespace causal_boot {

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::Conf:
      return "conf";
    case Regime::Unconf:
      return "unconf";
    case Regime::RevConf:
      return "revconf";
    case Regime::Unseen:
      return "unseen";
  }
  return "?";
}

Regime parse_regime(std::string_view text) {
  for (Regime r : kAllRegimes)
    if (text == regime_name(r)) return r;
  throw InvalidArgument("unknown regime '" + std::string(text) + "'");
}

bool Dataset::has_column(std::string_view name) const {
  if (name == "y") return true;
  if (name == "u") return u.has_value();
  if (name == "z") return z.has_value();
  if (name == "d") return d.has_value();
  if (name == "x") return dim > 0;
  return false;
}

std::span<const int> Dataset::covariate(std::string_view name) const {
  if (name == "y") return y;
  if (name == "u" && u) return *u;
  if (name == "z" && z) return *z;
  if (name == "d" && d) return *d;
  throw MissingColumnError(std::string(name));
}

std::vector<int> Dataset::discrete(std::string_view name) const {
  if (name == "x") {
    if (!x_support) throw InvalidArgument("column 'x' is continuous, not discrete");
    std::vector<int> codes(x.size());
    std::transform(x.begin(), x.end(), codes.begin(), [](double v) { return static_cast<int>(v); });
    return codes;
  }
  auto column = covariate(name);
  return {column.begin(), column.end()};
}

void Dataset::validate() const {
  const std::size_t n = y.size();
  if (x.size() != n * dim) throw InvalidArgument("dataset: X has wrong number of entries");
  auto check = [n](const std::vector<int>& column, const std::string& name) {
    if (column.size() != n) throw InvalidArgument("dataset: column '" + name + "' has wrong length");
    for (int v : column)
      if (v < 0) throw InvalidArgument("dataset: column '" + name + "' has a negative value");
  };
  check(y, "y");
  if (u) check(*u, "u");
  if (z) check(*z, "z");
  if (d) check(*d, "d");
  for (const auto& [name, column] : shadow) check(column, "_" + name);
  if (x_support && dim != 1) throw InvalidArgument("dataset: discrete X must have one column");
}

int column_domain(std::span<const int> values) {
  int top = 1;
  for (int v : values) top = std::max(top, v);
  return top + 1;
}

std::string format_real(double v) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  if (ec != std::errc()) throw Error("cannot format real");
  return std::string(buffer, end);
}

void write_csv(std::ostream& out, const Dataset& data, bool include_covariates, bool include_shadow) {
  data.validate();
  std::vector<std::string> header;
  for (std::size_t j = 0; j < data.dim; ++j) header.push_back("x" + std::to_string(j));
  header.push_back("y");
  std::vector<const std::vector<int>*> columns{&data.y};
  if (include_covariates) {
    if (data.u) {
      header.push_back("u");
      columns.push_back(&*data.u);
    }
    if (data.z) {
      header.push_back("z");
      columns.push_back(&*data.z);
    }
    if (data.d) {
      header.push_back("d");
      columns.push_back(&*data.d);
    }
  }
  if (include_shadow) {
    for (const auto& [name, column] : data.shadow) {
      header.push_back("_" + name);
      columns.push_back(&column);
    }
  }
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  std::string line;
  for (std::size_t n = 0; n < data.size(); ++n) {
    line.clear();
    for (std::size_t j = 0; j < data.dim; ++j) {
      const double v = data.x[n * data.dim + j];
      line += data.x_support ? std::to_string(static_cast<int>(v)) : format_real(v);
      line += ',';
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) line += ',';
      line += std::to_string((*columns[c])[n]);
    }
    out << line << '\n';
  }
}

namespace {

using text::trim;

std::vector<std::string_view> split_commas(std::string_view line) { return text::split(line, ','); }

double parse_real(std::string_view s, std::size_t line) {
  const auto v = text::to_number<double>(s);
  if (!v)
    throw InvalidArgument("csv line " + std::to_string(line) + ": bad real '" + std::string(s) + "'");
  return *v;
}

int parse_int(std::string_view s, std::size_t line) {
  const auto v = text::to_number<int>(s);
  if (!v || *v < 0)
    throw InvalidArgument("csv line " + std::to_string(line) + ": bad non-negative integer '" + std::string(s) + "'");
  return *v;
}

}  // namespace

Dataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("csv: missing header");
  const auto header_views = split_commas(line);
  std::vector<std::string> header;
  for (auto h : header_views) header.emplace_back(trim(h));

  Dataset data;
  enum class Slot { X, Y, U, Z, D, Shadow };
  std::vector<Slot> slots;
  std::vector<std::string> shadow_names;
  bool saw_y = false;
  for (const auto& h : header) {
    if (h.size() > 1 && h[0] == 'x' && std::all_of(h.begin() + 1, h.end(), ::isdigit)) {
      if (std::stoul(h.substr(1)) != data.dim) throw InvalidArgument("csv: feature columns must be x0..x{d-1} in order");
      slots.push_back(Slot::X);
      ++data.dim;
    } else if (h == "y") {
      slots.push_back(Slot::Y);
      saw_y = true;
    } else if (h == "u") {
      slots.push_back(Slot::U);
      data.u.emplace();
    } else if (h == "z") {
      slots.push_back(Slot::Z);
      data.z.emplace();
    } else if (h == "d") {
      slots.push_back(Slot::D);
      data.d.emplace();
    } else if (h.size() > 1 && h[0] == '_') {
      slots.push_back(Slot::Shadow);
      shadow_names.push_back(h.substr(1));
      data.shadow[h.substr(1)];
    } else {
      throw InvalidArgument("csv: unknown column '" + h + "'");
    }
  }
  if (!saw_y) throw MissingColumnError("y");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != slots.size())
      throw InvalidArgument("csv line " + std::to_string(line_no) + ": expected " + std::to_string(slots.size()) +
                            " fields");
    std::size_t shadow_index = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      switch (slots[i]) {
        case Slot::X:
          data.x.push_back(parse_real(fields[i], line_no));
          break;
        case Slot::Y:
          data.y.push_back(parse_int(fields[i], line_no));
          break;
        case Slot::U:
          data.u->push_back(parse_int(fields[i], line_no));
          break;
        case Slot::Z:
          data.z->push_back(parse_int(fields[i], line_no));
          break;
        case Slot::D:
          data.d->push_back(parse_int(fields[i], line_no));
          break;
        case Slot::Shadow:
          data.shadow[shadow_names[shadow_index++]].push_back(parse_int(fields[i], line_no));
          break;
      }
    }
  }
  data.validate();
  return data;
}

void write_csv_file(const std::string& path, const Dataset& data, bool include_covariates, bool include_shadow) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_csv(out, data, include_covariates, include_shadow);
  if (!out) throw Error("failed writing '" + path + "'");
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace causal_boot
