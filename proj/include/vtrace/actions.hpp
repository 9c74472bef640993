#pragma once

#include <string>
#include <vector>

#include "vtrace/core.hpp"

namespace vtrace {

// Per-dimension quantile bin boundaries for action tokenization. For each
// dimension there are n_bins - 1 interior boundaries plus the fitted data
// extremes.
struct BinTable {
  int n_bins = 256;
  int dims = 0;
  std::vector<std::vector<double>> boundaries;
  std::vector<double> data_min;
  std::vector<double> data_max;

  std::string check() const;
};

// Fits quantile boundaries per dimension: boundary i (1-based, i < n_bins)
// is the empirical quantile at i/n_bins with linear interpolation between
// order statistics (h = (n-1)*q). Requires at least n_bins samples per
// dimension.
BinTable fit_bins(const std::vector<std::vector<double>>& samples,
                  int n_bins = 256);

// Convenience: fits over a flat list of D-dimensional action vectors.
BinTable fit_bins_actions(const std::vector<std::vector<double>>& actions,
                          int n_bins = 256);

// Per dimension: the number of boundaries strictly less than the value,
// which lands in [0, n_bins-1] by construction.
std::vector<int> encode_action(const std::vector<double>& action,
                               const BinTable& bins);

// Inverse for round trips: midpoint of the bin's [left, right] interval,
// with data_min/data_max standing in at the extremes.
std::vector<double> decode_tokens(const std::vector<int>& tokens,
                                  const BinTable& bins);

// Serialization: {"n_bins":...,"dims":...,"boundaries":[[...]...],
// "min":[...],"max":[...]} with floats at 17 significant digits.
std::string bin_table_to_json(const BinTable& bins);
BinTable bin_table_from_json(const std::string& text);

void save_bin_table(const std::string& path, const BinTable& bins);
BinTable load_bin_table(const std::string& path);

}  // namespace vtrace
