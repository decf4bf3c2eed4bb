#include "tlr/cache.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tlr/common.hpp"
#include "tlr/corpus.hpp"

namespace tlr {

namespace fs = std::filesystem;

std::string featurize_config_text(const ModelConfig& model, const FeatureOptions& options,
                                  Language language, std::uint64_t content_hash) {
    std::ostringstream out;
    out << "language=" << language_name(language) << "\nlsa_rank=" << model.lsa_rank
        << "\nlda_topics=" << model.lda_topics
        << "\nlda_iterations=" << model.lda_iterations
        << "\nlda_beta=" << format_double(model.lda_beta)
        << "\nbm25_k1=" << format_double(model.bm25_k1)
        << "\nbm25_b=" << format_double(model.bm25_b)
        << "\ndirichlet_mu=" << format_double(model.dirichlet_mu)
        << "\njm_lambda=" << format_double(model.jm_lambda)
        << "\nrng_seed=" << model.rng_seed << "\neta=" << options.result_depth
        << "\nrobustness_reps=" << options.robustness_repetitions
        << "\nperturb_fraction=" << format_double(options.perturb_fraction)
        << "\npost_qq=" << (options.include_post_qq ? 1 : 0)
        << "\ncontent_hash=" << content_hash << "\n";
    return out.str();
}

namespace {

constexpr std::uint64_t kScoresMagic = 0x544c525343523031ULL;  // "TLRSCR01"

void save_scores(const fs::path& file, std::uint64_t config_hash,
                 const std::vector<std::vector<double>>& pooled) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write score cache: " + file.string());
    auto put64 = [&](std::uint64_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    };
    put64(kScoresMagic);
    put64(config_hash);
    put64(pooled.size());
    put64(pooled.empty() ? 0 : pooled.front().size());
    for (const auto& row : pooled) {
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
}

std::optional<std::vector<std::vector<double>>> load_scores(const fs::path& file,
                                                            std::uint64_t config_hash) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    auto get64 = [&]() {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        return v;
    };
    if (get64() != kScoresMagic || get64() != config_hash) return std::nullopt;
    const std::uint64_t rows = get64();
    const std::uint64_t cols = get64();
    std::vector<std::vector<double>> pooled(rows, std::vector<double>(cols));
    for (auto& row : pooled) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(cols * sizeof(double)));
    }
    if (!in) return std::nullopt;
    return pooled;
}

}  // namespace

DatasetArtifacts load_or_build_artifacts(const TraceDataset& dataset,
                                         const ModelConfig& model,
                                         const FeatureOptions& options,
                                         const fs::path& cache_dir) {
    const std::uint64_t content = dataset_content_hash(dataset);
    const std::string config_text =
        featurize_config_text(model, options, dataset.language, content);
    const std::uint64_t hash = fnv1a(config_text);

    const fs::path dir = cache_dir / dataset.name;
    fs::create_directories(dir);
    const fs::path csv = dir / "features.csv";
    const fs::path sidecar = dir / "features_minmax.json";
    const fs::path scores_file = dir / "pair_scores.bin";

    DatasetArtifacts artifacts;
    if (fs::exists(csv)) {
        const auto cached_hash = read_bounds_config_hash(sidecar);
        if (cached_hash && *cached_hash == hash) {
            if (auto scores = load_scores(scores_file, hash)) {
                artifacts.features = load_feature_csv(csv);
                artifacts.pooled_scores = std::move(*scores);
                artifacts.from_cache = true;
                return artifacts;
            }
        }
    }

    const CorpusModels models(dataset, model);
    artifacts.features = featurize(dataset, models, options, &artifacts.bounds);
    artifacts.pooled_scores = pooled_pair_scores(dataset, models);
    save_feature_csv(artifacts.features, csv);
    save_bounds_json(artifacts.bounds, artifacts.features.columns, hash, sidecar);
    save_scores(scores_file, hash, artifacts.pooled_scores);
    return artifacts;
}

}  // namespace tlr
