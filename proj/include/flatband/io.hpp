// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

// CSV and JSON emission. Every double goes out with 17 significant digits so
// identical runs give byte-identical files.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flatband/ed_oracle.hpp"
#include "flatband/observables.hpp"

namespace flatband {

std::string format_double(double v);

/// Extra named columns, one value per profile entry.
using ExtraColumns = std::vector<std::pair<std::string, std::vector<double>>>;

/// Columns: site_2x, x, [y_2x, y,] re, im, source, extras...
void write_profile_csv(std::ostream& os, const ObservableProfile& p, const ExtraColumns& extra = {});

nlohmann::ordered_json to_json(const ModelParams& p);
nlohmann::ordered_json to_json(const ObservableProfile& p);
nlohmann::ordered_json to_json(const DecayFit& f);
nlohmann::ordered_json to_json(const GroundSpaceReport& r);
nlohmann::ordered_json to_json(const SymmetryReport& r);

/// Plain row-oriented CSV with a fixed header.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<std::string>& cells);
  void write(std::ostream& os) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace flatband
