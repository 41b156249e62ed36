#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "univoque/config.hpp"
#include "univoque/gamma.hpp"

namespace univoque {

// Level cache: a versioned header line keyed by the config hash, then one
// JSON record per level. Replaying a cache resumes enumeration where the
// previous run stopped; a hash mismatch just invalidates the file.

inline constexpr const char* kCacheMagic = "univoque-cache";
inline constexpr int kCacheVersion = 1;

/// Fail-fast advisory lock; concurrent runs must not share a cache file.
class CacheLock {
  public:
    explicit CacheLock(const std::string& cache_path) : path_(cache_path + ".lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw BudgetError("cache file is locked by another run: " + path_);
    }
    ~CacheLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }
    CacheLock(const CacheLock&) = delete;
    CacheLock& operator=(const CacheLock&) = delete;

  private:
    std::string path_;
    int fd_ = -1;
};

namespace detail {

inline Json word_to_json(const Word& w) {
    Json a = Json::array();
    for (auto s : w.symbols) a.push_back(int(s));
    return a;
}

inline Word word_from_json(const Json& a) {
    std::vector<std::uint8_t> sym;
    for (const auto& v : a) sym.push_back(static_cast<std::uint8_t>(v.get<int>()));
    return Word(std::move(sym));
}

inline Json level_to_json(const Level& lvl) {
    Json j;
    j["k"] = lvl.depth;
    j["S"] = Json::array();
    for (const auto& [w, f] : lvl.S) j["S"].push_back(word_to_json(w));
    j["T"] = Json::array();
    for (const auto& [w, f] : lvl.T) j["T"].push_back(word_to_json(w));
    j["pruned"] = Json::array();
    for (const auto& [w, f] : lvl.pruned) j["pruned"].push_back(word_to_json(w));
    j["cells"] = Json::array();
    for (const auto& c : lvl.frontier)
        j["cells"].push_back(Json::array({word_to_json(c.word), c.multiplicity.str()}));
    return j;
}

/// Rebuilds the geometric state of a cached level; expansion bookkeeping
/// (child outcomes) is not cached, so resumed levels serve enumeration only.
inline Level level_from_json(const Json& j, const IFS& ifs, const Box& m) {
    Level lvl;
    lvl.depth = j.at("k").get<int>();
    for (const auto& w : j.at("S")) {
        Word word = word_from_json(w);
        lvl.S.emplace_back(word, word_map(ifs, word));
    }
    for (const auto& w : j.at("T")) {
        Word word = word_from_json(w);
        lvl.T.emplace_back(word, word_map(ifs, word));
    }
    for (const auto& w : j.at("pruned")) {
        Word word = word_from_json(w);
        lvl.pruned.emplace_back(word, word_map(ifs, word));
    }
    for (const auto& c : j.at("cells")) {
        Word word = word_from_json(c.at(0));
        lvl.frontier.push_back({word, word_map(ifs, word), Int(c.at(1).get<std::string>())});
    }
    for (const auto& c : lvl.frontier) lvl.frontier_boxes.push_back(image_box(c.map, m));
    lvl.adjacency = intersection_graph(lvl.frontier_boxes);

    // Reconstruct the expandable subset exactly as classify_children does.
    const int n = static_cast<int>(lvl.frontier.size());
    std::vector<int> comp(n);
    for (int i = 0; i < n; ++i) comp[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int jj : lvl.adjacency[i]) {
            int a = find(i), b = find(jj);
            if (a != b) comp[std::max(a, b)] = std::min(a, b);
        }
    std::vector<char> has_retained(n, 0);
    for (int i = 0; i < n; ++i)
        if (lvl.frontier[i].multiplicity == 1) has_retained[find(i)] = 1;
    for (int i = 0; i < n; ++i)
        if (lvl.frontier[i].multiplicity == 1 || has_retained[find(i)]) lvl.active.push_back(i);
    return lvl;
}

}  // namespace detail

/// Loads every cached level whose header matches; returns nothing on any
/// mismatch or corruption.
inline std::optional<std::vector<Level>> load_cache(const std::string& path, const IFS& ifs,
                                                    const Box& m, const std::string& hash) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string magic, hash_in;
    int version = 0;
    if (!(in >> magic >> version >> hash_in) || magic != kCacheMagic ||
        version != kCacheVersion || hash_in != hash)
        return std::nullopt;
    std::string line;
    std::getline(in, line);  // finish header line
    std::vector<Level> levels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            levels.push_back(detail::level_from_json(Json::parse(line), ifs, m));
        } catch (...) {
            break;  // ignore a torn tail; everything before it is usable
        }
    }
    return levels;
}

inline void save_cache(const std::string& path, const std::string& hash,
                       const std::vector<Level>& levels) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write cache file " + path);
    out << kCacheMagic << ' ' << kCacheVersion << ' ' << hash << '\n';
    for (const auto& lvl : levels) out << detail::level_to_json(lvl).dump() << '\n';
}

/// enumerate_levels with cache replay: consistent prior levels are reused,
/// new ones are appended and written back.
inline GammaTruncation enumerate_with_cache(const IFS& ifs, const Box& m, int depth,
                                            EnumerateOptions opts, const std::string& cache_path,
                                            const std::string& hash, bool* resumed = nullptr) {
    CacheLock lock(cache_path);
    GammaTruncation out;
    out.requested_depth = depth;
    auto cached = load_cache(cache_path, ifs, m, hash);
    if (resumed) *resumed = cached.has_value() && !cached->empty();
    if (cached) out.levels = std::move(*cached);
    if ((int)out.levels.size() > depth) out.levels.resize(depth);

    while ((int)out.levels.size() < depth) {
        const bool first = out.levels.empty();
        const std::size_t parent_count = first ? 1 : out.levels.back().active.size();
        if (!first && parent_count == 0) break;
        if (parent_count * ifs.alphabet_size() > opts.frontier_budget) {
            out.truncated_by_budget = true;
            break;
        }
        out.levels.push_back(first ? initial_level(ifs, m, opts.prune)
                                   : next_level(ifs, m, out.levels.back(), opts.prune));
    }
    for (const auto& lvl : out.levels)
        for (const auto& [w, f] : lvl.S)
            out.gamma_words.push_back({w, word_ratio(ifs, w), f, lvl.depth});
    save_cache(cache_path, hash, out.levels);
    return out;
}

}  // namespace univoque
