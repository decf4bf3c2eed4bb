#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tlr/text.hpp"

namespace tlr {

/// Recipe for one generated benchmark corpus. The shipped corpora mirror the
/// shapes of the classic traceability benchmarks (artifact counts, oracle
/// sizes, language) with synthetic text whose lexical overlap structure is
/// controlled by the knobs below.
struct SyntheticDatasetSpec {
    std::string name;           // directory name, e.g. "easyclinic_id_uc"
    std::string display;        // e.g. "EasyClinic(ID-UC)"
    Language language = Language::english;
    std::string source_kind;    // ID, UC, CC, TC, HighR, LowR
    std::string target_kind;
    int num_sources = 0;
    int num_targets = 0;
    int num_valid = 0;
    std::uint64_t seed = 0;

    double signal_strength = 0.6;   // share of a target's identity words copied per valid link
    double weak_link_rate = 0.12;   // valid links reduced to a single shared word
    double boiler_ratio = 0.25;     // shared-vocabulary share of each document
    double distractor_rate = 2.0;   // mean non-linked targets each source borrows words from
    double cluster_identity = 0.3;  // share of identity words drawn from the cluster pool
    int doc_len_min = 45;
    int doc_len_max = 110;
};

/// The eleven shipped corpora (shapes match the benchmark suite totals:
/// 32,616 candidate pairs, 2,600 valid).
const std::vector<SyntheticDatasetSpec>& standard_datasets();

/// Writes source/, target/, answers.txt and meta.json under out_dir.
/// Deterministic for a fixed spec.
void generate_dataset(const SyntheticDatasetSpec& spec, const Preprocessor& pre,
                      const std::filesystem::path& out_dir);

}  // namespace tlr
