#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "etchforge/evalbench.hpp"
#include "etchforge/events.hpp"
#include "etchforge/features.hpp"
#include "etchforge/pipeline.hpp"

namespace etchforge {

/// FNV-1a 64-bit over the file bytes, rendered as "fnv1a:<hex>". Stable
/// across platforms; used to tie stage artifacts together.
std::string hash_file(const std::filesystem::path& path);

/// labeled.jsonl + segments.jsonl in `dir`.
void write_labeled_dataset(const LabeledDataset& dataset, const EventLog& log,
                           const std::filesystem::path& dir);

/// Rebuilds the dataset from labeled.jsonl + segments.jsonl; run ids are
/// resolved against `log`. Throws MalformedRecord / MissingFile.
LabeledDataset read_labeled_dataset(const EventLog& log, const std::filesystem::path& dir);

/// features.csv (run_id + named columns) for the given rows.
void write_feature_csv(const FeatureMatrix& matrix, const EventLog& log, const LabeledDataset& dataset,
                       const std::vector<std::size_t>& rows, const std::filesystem::path& path);

/// Sidecar provenance map: column name -> feature group.
void write_feature_provenance(const FeatureMatrix& matrix, const std::filesystem::path& path);

/// Per-code median-TTF report (both penalty tables), sorted ascending by
/// median TTF: the tabular analogue of the violation/alarm box plots.
std::string penalties_csv(const PenaltyTable& alarms, const PenaltyTable& violations);

}  // namespace etchforge
