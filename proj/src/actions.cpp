#include "vtrace/actions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vtrace/error.hpp"

namespace vtrace {

std::string BinTable::check() const {
  if (n_bins < 2) return "n_bins must be at least 2";
  if (dims < 1) return "table must have at least one dimension";
  if (boundaries.size() != static_cast<std::size_t>(dims) ||
      data_min.size() != static_cast<std::size_t>(dims) ||
      data_max.size() != static_cast<std::size_t>(dims)) {
    return "table field lengths disagree with dims";
  }
  for (int d = 0; d < dims; ++d) {
    const auto& b = boundaries[d];
    if (b.size() != static_cast<std::size_t>(n_bins - 1)) {
      return "boundary list has wrong length";
    }
    if (!std::is_sorted(b.begin(), b.end())) {
      return "boundaries must be non-decreasing";
    }
    if (data_min[d] > b.front() || b.back() > data_max[d]) {
      return "boundaries must lie within the data extremes";
    }
  }
  return {};
}

namespace {

double interpolated_quantile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  const double h = static_cast<double>(n - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BinTable fit_bins(const std::vector<std::vector<double>>& samples, int n_bins) {
  if (n_bins < 2) throw validation_error("n_bins must be at least 2");
  if (samples.empty()) throw validation_error("no sample dimensions");

  BinTable table;
  table.n_bins = n_bins;
  table.dims = static_cast<int>(samples.size());
  table.boundaries.resize(samples.size());
  table.data_min.resize(samples.size());
  table.data_max.resize(samples.size());

  for (std::size_t d = 0; d < samples.size(); ++d) {
    if (samples[d].size() < static_cast<std::size_t>(n_bins)) {
      throw validation_error("need at least n_bins samples per dimension");
    }
    std::vector<double> sorted = samples[d];
    std::sort(sorted.begin(), sorted.end());
    table.data_min[d] = sorted.front();
    table.data_max[d] = sorted.back();
    table.boundaries[d].resize(static_cast<std::size_t>(n_bins - 1));
    for (int i = 1; i < n_bins; ++i) {
      table.boundaries[d][static_cast<std::size_t>(i - 1)] =
          interpolated_quantile(sorted, static_cast<double>(i) / n_bins);
    }
  }
  return table;
}

BinTable fit_bins_actions(const std::vector<std::vector<double>>& actions,
                          int n_bins) {
  if (actions.empty()) throw validation_error("no action samples");
  const std::size_t dims = actions.front().size();
  if (dims == 0) throw validation_error("actions must have at least one dimension");
  std::vector<std::vector<double>> columns(dims);
  for (auto& c : columns) c.reserve(actions.size());
  for (const auto& a : actions) {
    if (a.size() != dims) throw validation_error("action dimension mismatch");
    for (std::size_t d = 0; d < dims; ++d) columns[d].push_back(a[d]);
  }
  return fit_bins(columns, n_bins);
}

std::vector<int> encode_action(const std::vector<double>& action,
                               const BinTable& bins) {
  if (auto msg = bins.check(); !msg.empty()) throw validation_error(msg);
  if (action.size() != static_cast<std::size_t>(bins.dims)) {
    throw validation_error("action dimension mismatch");
  }
  std::vector<int> tokens(action.size());
  for (std::size_t d = 0; d < action.size(); ++d) {
    const auto& b = bins.boundaries[d];
    const auto it = std::lower_bound(b.begin(), b.end(), action[d]);
    tokens[d] = static_cast<int>(it - b.begin());
  }
  return tokens;
}

std::vector<double> decode_tokens(const std::vector<int>& tokens,
                                  const BinTable& bins) {
  if (auto msg = bins.check(); !msg.empty()) throw validation_error(msg);
  if (tokens.size() != static_cast<std::size_t>(bins.dims)) {
    throw validation_error("token dimension mismatch");
  }
  std::vector<double> values(tokens.size());
  for (std::size_t d = 0; d < tokens.size(); ++d) {
    const int idx = tokens[d];
    if (idx < 0 || idx >= bins.n_bins) {
      throw validation_error("token index out of range");
    }
    const auto& b = bins.boundaries[d];
    const double left = idx == 0 ? bins.data_min[d] : b[static_cast<std::size_t>(idx - 1)];
    const double right =
        idx == bins.n_bins - 1 ? bins.data_max[d] : b[static_cast<std::size_t>(idx)];
    values[d] = 0.5 * (left + right);
  }
  return values;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_array(std::string& out, const std::vector<double>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  out += ']';
}

}  // namespace

std::string bin_table_to_json(const BinTable& bins) {
  if (auto msg = bins.check(); !msg.empty()) throw validation_error(msg);
  std::string out;
  out += "{\"n_bins\":" + std::to_string(bins.n_bins);
  out += ",\"dims\":" + std::to_string(bins.dims);
  out += ",\"boundaries\":[";
  for (int d = 0; d < bins.dims; ++d) {
    if (d) out += ',';
    append_array(out, bins.boundaries[static_cast<std::size_t>(d)]);
  }
  out += "],\"min\":";
  append_array(out, bins.data_min);
  out += ",\"max\":";
  append_array(out, bins.data_max);
  out += "}";
  return out;
}

BinTable bin_table_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("invalid bin table JSON: ") + e.what());
  }
  BinTable table;
  try {
    table.n_bins = j.at("n_bins").get<int>();
    table.dims = j.at("dims").get<int>();
    table.boundaries = j.at("boundaries").get<std::vector<std::vector<double>>>();
    table.data_min = j.at("min").get<std::vector<double>>();
    table.data_max = j.at("max").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("invalid bin table JSON: ") + e.what());
  }
  if (auto msg = table.check(); !msg.empty()) throw validation_error(msg);
  return table;
}

void save_bin_table(const std::string& path, const BinTable& bins) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << bin_table_to_json(bins) << '\n';
  if (!out) throw io_error("failed to write " + path);
}

BinTable load_bin_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return bin_table_from_json(buf.str());
}

}  // namespace vtrace
