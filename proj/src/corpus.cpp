#include "tlr/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tlr/common.hpp"

namespace tlr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read artifact file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<Artifact> load_side(const fs::path& dir, Side side, const Preprocessor& pre) {
    if (!fs::is_directory(dir)) {
        throw DataError("dataset is missing directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<Artifact> artifacts;
    artifacts.reserve(files.size());
    for (const auto& file : files) {
        Artifact a;
        a.id = file.stem().string();
        a.side = side;
        a.raw_text = read_file(file);
        a.tokens = pre.preprocess(a.raw_text);
        a.empty_after_preprocessing = a.tokens.empty();
        artifacts.push_back(std::move(a));
    }
    std::sort(artifacts.begin(), artifacts.end(),
              [](const Artifact& x, const Artifact& y) { return x.id < y.id; });
    for (std::size_t i = 1; i < artifacts.size(); ++i) {
        if (artifacts[i].id == artifacts[i - 1].id) {
            throw DataError("duplicate artifact id '" + artifacts[i].id + "' in " +
                            dir.string());
        }
    }
    return artifacts;
}

}  // namespace

const Artifact* TraceDataset::find(Side side, const std::string& id) const {
    const auto& list = side == Side::source ? sources : targets;
    const auto it = std::lower_bound(
        list.begin(), list.end(), id,
        [](const Artifact& a, const std::string& key) { return a.id < key; });
    return it != list.end() && it->id == id ? &*it : nullptr;
}

TraceDataset load_dataset(const fs::path& dir, const Preprocessor& pre,
                          const std::string& name) {
    TraceDataset ds;
    ds.name = name.empty() ? dir.filename().string() : name;
    ds.language = pre.language();
    ds.sources = load_side(dir / "source", Side::source, pre);
    ds.targets = load_side(dir / "target", Side::target, pre);

    const fs::path answers = dir / "answers.txt";
    std::ifstream in(answers);
    if (!in) throw DataError("missing answer file: " + answers.string());

    std::vector<std::string> offenders;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError("answers.txt line " + std::to_string(lineno) +
                            " is not tab-separated: '" + line + "'");
        }
        std::string src = line.substr(0, tab);
        std::string tgt = line.substr(tab + 1);
        if (!ds.find(Side::source, src)) offenders.push_back(src + " (source, line " +
                                                             std::to_string(lineno) + ")");
        if (!ds.find(Side::target, tgt)) offenders.push_back(tgt + " (target, line " +
                                                             std::to_string(lineno) + ")");
        ds.valid_links.emplace(std::move(src), std::move(tgt));
    }
    if (!offenders.empty()) {
        std::string msg = "answers.txt references unknown artifact ids:";
        for (const auto& o : offenders) msg += "\n  " + o;
        throw DataError(msg);
    }
    return ds;
}

std::vector<CandidateLink> enumerate_links(const TraceDataset& dataset) {
    std::vector<CandidateLink> links;
    links.reserve(dataset.candidate_count());
    // artifact lists are already sorted by id, so the nested loop is sorted
    // by (source_id, target_id)
    for (const auto& s : dataset.sources) {
        for (const auto& t : dataset.targets) {
            CandidateLink link;
            link.source_id = s.id;
            link.target_id = t.id;
            link.label = dataset.valid_links.count({s.id, t.id}) > 0;
            links.push_back(std::move(link));
        }
    }
    return links;
}

void dump_tokens_jsonl(const TraceDataset& dataset, const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write tokens dump: " + file.string());
    auto write_side = [&](const std::vector<Artifact>& artifacts, const char* side) {
        for (const auto& a : artifacts) {
            json obj{{"id", a.id}, {"side", side}, {"tokens", a.tokens}};
            out << obj.dump() << '\n';
        }
    };
    write_side(dataset.sources, "source");
    write_side(dataset.targets, "target");
}

std::uint64_t dataset_content_hash(const TraceDataset& dataset) {
    std::string blob = language_name(dataset.language);
    auto add_side = [&](const std::vector<Artifact>& artifacts) {
        for (const auto& a : artifacts) {
            blob += '\x1f';
            blob += a.id;
            blob += '\x1e';
            blob += a.raw_text;
        }
    };
    add_side(dataset.sources);
    add_side(dataset.targets);
    for (const auto& [s, t] : dataset.valid_links) {
        blob += '\x1f';
        blob += s;
        blob += '\t';
        blob += t;
    }
    return fnv1a(blob);
}

Language dataset_language_hint(const fs::path& dir, Language fallback) {
    const fs::path meta = dir / "meta.json";
    std::ifstream in(meta);
    if (!in) return fallback;
    try {
        json j;
        in >> j;
        if (j.contains("language")) return parse_language(j["language"].get<std::string>());
    } catch (const json::exception& e) {
        throw DataError("malformed meta.json in " + dir.string() + ": " + e.what());
    }
    return fallback;
}

}  // namespace tlr
