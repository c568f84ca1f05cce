#pragma once

// Basin-of-attraction census.
//
// Exact mode enumerates all 2^k windows. Because the successor of w is
// ((w << 1) | fire(w)) mod 2^k, storing the fire bit of every state (one bit
// per state) defines the whole functional graph. Pass 1 fills that bit array
// in independent chunks. Pass 2 peels every state of in-degree zero (a second
// bit array marks removed states), which leaves exactly the cycle states, then
// walks each cycle once and counts its basin with a reverse depth-first search
// whose depth is the transient length.
//
// Sampled mode runs detect_cycle on windows drawn from a counter-based
// generator keyed by (seed, sample index).

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nre/cycle.hpp"
#include "nre/digest.hpp"
#include "nre/equation.hpp"

namespace nre {

enum class CensusKind { Exact, Sampled };

struct CensusMode {
    CensusKind kind = CensusKind::Exact;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const CensusMode&, const CensusMode&) = default;
};

struct AttractorRecord {
    StateWindow key;       ///< minimum window on the cycle
    std::uint64_t period = 0;
    std::uint64_t basin = 0;  ///< windows (exact) or samples (sampled) reaching it
    StateWindow witness;   ///< an initial window that converges to this cycle

    friend bool operator==(const AttractorRecord&, const AttractorRecord&) = default;
};

struct BasinCensus {
    std::size_t memory_k = 0;
    std::uint64_t total = 0;
    CensusMode mode;
    std::map<std::uint64_t, std::uint64_t> chi;         ///< period -> count
    std::map<std::uint64_t, std::uint64_t> transients;  ///< transient length -> count
    std::vector<AttractorRecord> attractors;            ///< ascending key

    std::uint64_t counted() const {
        std::uint64_t n = 0;
        for (const auto& [p, c] : chi) n += c;
        return n;
    }

    friend bool operator==(const BasinCensus&, const BasinCensus&) = default;
};

inline constexpr std::size_t kMaxExactMemory = 32;

struct CensusOptions {
    unsigned workers = 1;
    unsigned chunk_bits = 20;  ///< pass-1 chunk holds 2^chunk_bits states
    std::size_t max_memory_k = kMaxExactMemory;
    std::optional<std::filesystem::path> checkpoint;
    std::uint64_t checkpoint_every = 256;  ///< chunks between checkpoint writes
    /// Write the checkpoint and throw CensusInterrupted after this many work
    /// units (pass-1 chunks plus pass-2 cycles) in the current run.
    std::optional<std::uint64_t> stop_after_units;
};

/// Fire bit of every window of a memory-k equation, k <= 32.
class FireBits {
public:
    explicit FireBits(std::size_t k)
        : k_(k), states_(std::uint64_t{1} << k), words_((states_ + 63) / 64, 0) {}

    std::size_t memory() const noexcept { return k_; }
    std::uint64_t states() const noexcept { return states_; }
    bool get(std::uint64_t w) const noexcept { return (words_[w >> 6] >> (w & 63)) & 1U; }
    std::vector<std::uint64_t>& words() noexcept { return words_; }
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    friend bool operator==(const FireBits&, const FireBits&) = default;

private:
    std::size_t k_;
    std::uint64_t states_;
    std::vector<std::uint64_t> words_;
};

namespace detail {

// Potential as a sum of per-byte lookups.
class ByteTables {
public:
    explicit ByteTables(const NeuronEquation& eq) : threshold2_(eq.threshold2()) {
        const std::size_t k = eq.memory();
        tables_.resize((k + 7) / 8);
        for (std::size_t b = 0; b < tables_.size(); ++b)
            for (unsigned v = 0; v < 256; ++v) {
                std::int64_t sum = 0;
                for (unsigned i = 0; i < 8; ++i)
                    if (((v >> i) & 1U) && b * 8 + i < k) sum += eq.coeffs()[b * 8 + i];
                tables_[b][v] = sum;
            }
    }

    bool fires(std::uint64_t w) const noexcept {
        std::int64_t sum = 0;
        for (const auto& t : tables_) {
            sum += t[w & 0xFF];
            w >>= 8;
        }
        return sum - threshold2_ >= 0;
    }

private:
    std::vector<std::array<std::int64_t, 256>> tables_;
    std::int64_t threshold2_;
};

inline void fill_states(FireBits& fire, const ByteTables& tables, std::uint64_t begin, std::uint64_t end) {
    auto& words = fire.words();
    for (std::uint64_t base = begin; base < end; base += 64) {
        std::uint64_t bits = 0;
        const std::uint64_t n = std::min<std::uint64_t>(64, end - base);
        for (std::uint64_t b = 0; b < n; ++b)
            if (tables.fires(base + b)) bits |= std::uint64_t{1} << b;
        words[base >> 6] = bits;
    }
}

inline std::uint64_t chunk_states_for(std::size_t k, unsigned chunk_bits) {
    const std::uint64_t states = std::uint64_t{1} << k;
    const std::uint64_t chunk = std::uint64_t{1} << std::max(6U, chunk_bits);
    return std::min(states, chunk);
}

// Fills the listed chunks, splitting the list into `workers` contiguous runs.
// Chunks are multiples of 64 states, so threads never share an output word.
inline void fill_chunks(FireBits& fire, const ByteTables& tables, const std::vector<std::uint64_t>& chunks,
                        std::uint64_t chunk_states, unsigned workers) {
    workers = std::max(1U, workers);
    const std::size_t n = chunks.size();
    auto run = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            fill_states(fire, tables, chunks[i] * chunk_states, (chunks[i] + 1) * chunk_states);
    };
    if (workers == 1 || n < 2) {
        run(0, n);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& t : pool) t.join();
}

struct CycleRecord {
    std::uint64_t key = 0;
    std::uint64_t period = 0;
    std::uint64_t basin = 0;
    std::vector<std::uint64_t> transients;  ///< index = transient length
};

struct CheckpointState {
    std::size_t k = 0;
    std::string digest;
    std::uint64_t chunk_states = 0;
    std::vector<std::uint8_t> done;  ///< per pass-1 chunk
    std::map<std::uint64_t, CycleRecord> cycles;
};

inline constexpr std::string_view kCheckpointTag = "NRE-CENSUS-1";

inline void write_checkpoint(const std::filesystem::path& path, const CheckpointState& st, const FireBits& fire) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write checkpoint " + tmp.string());
        out << kCheckpointTag << '\n';
        out << "k " << st.k << '\n';
        out << "digest " << st.digest << '\n';
        out << "chunk_states " << st.chunk_states << '\n';
        out << "done ";
        for (auto d : st.done) out << (d ? '1' : '0');
        out << '\n';
        out << "cycles " << st.cycles.size() << '\n';
        for (const auto& [key, c] : st.cycles) {
            out << c.key << ' ' << c.period << ' ' << c.basin << ' ' << c.transients.size();
            for (auto t : c.transients) out << ' ' << t;
            out << '\n';
        }
        const auto& words = fire.words();
        out << "fire " << words.size() * sizeof(std::uint64_t) << '\n';
        // little-endian host assumed, as on every supported target
        out.write(reinterpret_cast<const char*>(words.data()),
                  static_cast<std::streamsize>(words.size() * sizeof(std::uint64_t)));
        if (!out) throw Error("short write to checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline CheckpointState read_checkpoint(const std::filesystem::path& path, const CheckpointState& expect,
                                       FireBits& fire) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointMismatch("cannot open checkpoint " + path.string());
    auto field = [&](std::string_view name) {
        std::string label;
        in >> label;
        if (label != name) throw CheckpointMismatch("checkpoint field '" + std::string(name) + "' missing");
    };
    std::string tag;
    std::getline(in, tag);
    if (tag != kCheckpointTag) throw CheckpointMismatch("not a census checkpoint: " + path.string());
    CheckpointState st;
    field("k");
    in >> st.k;
    field("digest");
    in >> st.digest;
    field("chunk_states");
    in >> st.chunk_states;
    if (st.k != expect.k || st.digest != expect.digest)
        throw CheckpointMismatch("checkpoint belongs to a different equation");
    if (st.chunk_states != expect.chunk_states)
        throw CheckpointMismatch("checkpoint chunk layout differs from the requested one");
    field("done");
    std::string done;
    in >> done;
    if (done.size() != expect.done.size()) throw CheckpointMismatch("checkpoint chunk bitmap has wrong size");
    for (char c : done) st.done.push_back(c == '1' ? 1 : 0);
    field("cycles");
    std::size_t n = 0;
    in >> n;
    for (std::size_t i = 0; i < n; ++i) {
        CycleRecord c;
        std::size_t nt = 0;
        in >> c.key >> c.period >> c.basin >> nt;
        c.transients.resize(nt);
        for (auto& t : c.transients) in >> t;
        st.cycles.emplace(c.key, std::move(c));
    }
    field("fire");
    std::size_t bytes = 0;
    in >> bytes;
    in.get();
    auto& words = fire.words();
    if (bytes != words.size() * sizeof(std::uint64_t)) throw CheckpointMismatch("checkpoint bit array has wrong size");
    in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw CheckpointMismatch("truncated checkpoint " + path.string());
    return st;
}

class BitArray {
public:
    explicit BitArray(std::uint64_t n) : words_((n + 63) / 64, 0) {}
    bool get(std::uint64_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::uint64_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

private:
    std::vector<std::uint64_t> words_;
};

}  // namespace detail

/// Pass 1 on its own: the fire bit of every window.
inline FireBits compute_fire_bits(const NeuronEquation& eq, unsigned workers = 1, unsigned chunk_bits = 20) {
    const std::size_t k = eq.memory();
    if (k > kMaxExactMemory) throw MemoryGuard(k, kMaxExactMemory);
    FireBits fire(k);
    const detail::ByteTables tables(eq);
    const std::uint64_t chunk = detail::chunk_states_for(k, chunk_bits);
    std::vector<std::uint64_t> all(fire.states() / chunk);
    for (std::uint64_t i = 0; i < all.size(); ++i) all[i] = i;
    detail::fill_chunks(fire, tables, all, chunk, workers);
    return fire;
}

/// Exact census over all 2^k initial windows.
inline BasinCensus full_census(const NeuronEquation& eq, const CensusOptions& opt = {}) {
    const std::size_t k = eq.memory();
    if (k > std::min(opt.max_memory_k, kMaxExactMemory)) throw MemoryGuard(k, std::min(opt.max_memory_k, kMaxExactMemory));
    FireBits fire(k);
    const std::uint64_t N = fire.states();
    const std::uint64_t mask = N - 1;
    const std::uint64_t top = std::uint64_t{1} << (k - 1);

    detail::CheckpointState st;
    st.k = k;
    st.digest = equation_digest(eq);
    st.chunk_states = detail::chunk_states_for(k, opt.chunk_bits);
    st.done.assign(N / st.chunk_states, 0);
    if (opt.checkpoint && std::filesystem::exists(*opt.checkpoint))
        st = detail::read_checkpoint(*opt.checkpoint, st, fire);

    std::uint64_t units = 0;
    auto save = [&] {
        if (opt.checkpoint) detail::write_checkpoint(*opt.checkpoint, st, fire);
    };
    auto budget_left = [&]() -> std::uint64_t {
        return opt.stop_after_units ? *opt.stop_after_units - std::min(units, *opt.stop_after_units)
                                    : ~std::uint64_t{0};
    };
    auto maybe_stop = [&] {
        if (opt.stop_after_units && units >= *opt.stop_after_units) {
            save();
            throw CensusInterrupted();
        }
    };

    // pass 1
    const detail::ByteTables tables(eq);
    std::vector<std::uint64_t> pending;
    for (std::uint64_t c = 0; c < st.done.size(); ++c)
        if (!st.done[c]) pending.push_back(c);
    const std::uint64_t round = opt.checkpoint ? std::max<std::uint64_t>(1, opt.checkpoint_every) : pending.size();
    for (std::size_t pos = 0; pos < pending.size();) {
        const std::uint64_t take = std::min<std::uint64_t>({round, pending.size() - pos, budget_left()});
        std::vector<std::uint64_t> batch(pending.begin() + static_cast<std::ptrdiff_t>(pos),
                                         pending.begin() + static_cast<std::ptrdiff_t>(pos + take));
        detail::fill_chunks(fire, tables, batch, st.chunk_states, opt.workers);
        for (auto c : batch) st.done[c] = 1;
        pos += take;
        units += take;
        if (pos < pending.size() || opt.stop_after_units) save();
        maybe_stop();
    }

    // pass 2a: peel states of zero live in-degree; survivors lie on cycles
    detail::BitArray removed(N);
    auto live_preds = [&](std::uint64_t v) {
        const bool b = v & 1U;
        const std::uint64_t p0 = v >> 1;
        const std::uint64_t p1 = p0 | top;
        return static_cast<int>(fire.get(p0) == b && !removed.get(p0)) +
               static_cast<int>(fire.get(p1) == b && !removed.get(p1));
    };
    auto succ = [&](std::uint64_t v) { return ((v << 1) | (fire.get(v) ? 1U : 0U)) & mask; };
    for (std::uint64_t w = 0; w < N; ++w) {
        std::uint64_t v = w;
        while (!removed.get(v) && live_preds(v) == 0) {
            removed.set(v);
            v = succ(v);
        }
    }

    // pass 2b: each cycle, found at its minimum state, then its basin
    std::vector<std::uint64_t> cycle;
    std::vector<std::uint64_t> stack;
    for (std::uint64_t w = 0; w < N; ++w) {
        if (removed.get(w)) continue;
        cycle.clear();
        std::uint64_t v = w;
        do {
            cycle.push_back(v);
            removed.set(v);
            v = succ(v);
        } while (v != w);
        if (st.cycles.contains(w)) continue;

        detail::CycleRecord rec;
        rec.key = w;
        rec.period = cycle.size();
        rec.basin = cycle.size();
        rec.transients.assign(1, cycle.size());
        const std::size_t p = cycle.size();
        for (std::size_t i = 0; i < p; ++i) {
            const std::uint64_t c = cycle[i];
            const std::uint64_t on_cycle_pred = cycle[(i + p - 1) % p];
            const bool b = c & 1U;
            for (std::uint64_t pred : {c >> 1, (c >> 1) | top})
                if (pred != on_cycle_pred && fire.get(pred) == b) stack.push_back(pred | (std::uint64_t{1} << 32));
        }
        while (!stack.empty()) {
            const std::uint64_t entry = stack.back();
            stack.pop_back();
            const std::uint64_t node = entry & 0xFFFFFFFFULL;
            const std::uint64_t depth = entry >> 32;
            ++rec.basin;
            if (rec.transients.size() <= depth) rec.transients.resize(depth + 1, 0);
            ++rec.transients[depth];
            const bool b = node & 1U;
            const std::uint64_t next = (depth + 1) << 32;
            const std::uint64_t p0 = node >> 1;
            if (fire.get(p0) == b) stack.push_back(p0 | next);
            if (fire.get(p0 | top) == b) stack.push_back((p0 | top) | next);
        }
        st.cycles.emplace(w, std::move(rec));
        ++units;
        if (opt.stop_after_units) save();
        maybe_stop();
    }
    save();

    BasinCensus out;
    out.memory_k = k;
    out.total = N;
    out.mode = {CensusKind::Exact, 0, 0};
    for (const auto& [key, rec] : st.cycles) {
        out.chi[rec.period] += rec.basin;
        for (std::size_t t = 0; t < rec.transients.size(); ++t)
            if (rec.transients[t] != 0) out.transients[t] += rec.transients[t];
        const auto kw = StateWindow::from_u64(k, key);
        out.attractors.push_back({kw, rec.period, rec.basin, kw});
    }
    return out;
}

/// Counter-based generator: the value depends only on (seed, index, word).
inline std::uint64_t counter_random(std::uint64_t seed, std::uint64_t index, std::uint64_t word) {
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + (index + 1) * 0xBF58476D1CE4E5B9ULL +
                      (word + 1) * 0x94D049BB133111EBULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform window of `k` bits for sample `index`.
inline StateWindow random_window(std::size_t k, std::uint64_t seed, std::uint64_t index) {
    StateWindow w(k);
    for (std::size_t i = 0; i < k; i += 64) {
        const std::uint64_t r = counter_random(seed, index, i / 64);
        for (std::size_t b = 0; b < 64 && i + b < k; ++b)
            if ((r >> b) & 1U) w.set(i + b, true);
    }
    return w;
}

/// Aggregates detect_cycle over a fixed list of initial windows.
inline BasinCensus census_of_windows(const NeuronEquation& eq, const std::vector<StateWindow>& inits,
                                     std::uint64_t max_steps = kDefaultMaxSteps, unsigned workers = 1) {
    const std::size_t n = inits.size();
    std::vector<CycleSummary> results(n);
    std::vector<std::int64_t> failure(std::max(1U, workers), -1);
    auto run = [&](unsigned w, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                results[i] = detect_cycle(eq, inits[i], max_steps);
            } catch (const CycleNotFound&) {
                failure[w] = static_cast<std::int64_t>(i);
                return;
            }
        }
    };
    workers = std::max(1U, workers);
    if (workers == 1) {
        run(0, 0, n);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, n * w / workers, n * (w + 1) / workers);
        for (auto& t : pool) t.join();
    }
    for (auto f : failure)
        if (f >= 0) throw CycleNotFound(max_steps, f);

    BasinCensus out;
    out.memory_k = eq.memory();
    out.total = n;
    out.mode = {CensusKind::Sampled, n, 0};
    std::map<StateWindow, AttractorRecord> by_key;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = results[i];
        ++out.chi[r.period];
        ++out.transients[r.transient];
        auto [it, inserted] = by_key.try_emplace(r.attractor_key, AttractorRecord{r.attractor_key, r.period, 0, inits[i]});
        ++it->second.basin;
    }
    for (auto& [key, rec] : by_key) out.attractors.push_back(std::move(rec));
    return out;
}

/// detect_cycle on `n_samples` uniform windows from the (seed, index) generator.
inline BasinCensus sampled_census(const NeuronEquation& eq, std::uint64_t n_samples, std::uint64_t seed,
                                  std::uint64_t max_steps = kDefaultMaxSteps, unsigned workers = 1) {
    if (n_samples < 1) throw ParameterError("sampled census needs at least one sample");
    std::vector<StateWindow> inits;
    inits.reserve(n_samples);
    for (std::uint64_t i = 0; i < n_samples; ++i) inits.push_back(random_window(eq.memory(), seed, i));
    BasinCensus out = census_of_windows(eq, inits, max_steps, workers);
    out.mode = {CensusKind::Sampled, n_samples, seed};
    return out;
}

/// Windows of the basin of the cycle through `on_cycle`, found by walking
/// predecessors backwards (breadth first), paired with their transient length.
/// Cycle windows come first with transient 0. Requires memory <= 64.
inline std::vector<std::pair<StateWindow, std::uint64_t>> basin_walk(const NeuronEquation& eq,
                                                                     const StateWindow& on_cycle,
                                                                     std::size_t limit) {
    const std::size_t k = eq.memory();
    if (k > 64) throw ParameterError("basin_walk supports memory up to 64");
    const std::uint64_t top = std::uint64_t{1} << (k - 1);
    auto fire_u64 = [&](std::uint64_t w) {
        return detail::potential_word(eq.coeffs(), w) - eq.threshold2() >= 0;
    };
    std::vector<std::uint64_t> cycle{on_cycle.to_u64()};
    const std::uint64_t mask = detail::low_mask(k);
    for (std::uint64_t v = ((cycle[0] << 1) | (fire_u64(cycle[0]) ? 1U : 0U)) & mask; v != cycle[0];
         v = ((v << 1) | (fire_u64(v) ? 1U : 0U)) & mask)
        cycle.push_back(v);
    std::vector<std::pair<StateWindow, std::uint64_t>> out;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> frontier;
    for (auto c : cycle) {
        out.emplace_back(StateWindow::from_u64(k, c), 0);
        frontier.emplace_back(c, 0);
    }
    std::sort(cycle.begin(), cycle.end());
    for (std::size_t head = 0; head < frontier.size() && out.size() < limit; ++head) {
        const auto [node, depth] = frontier[head];
        const bool b = node & 1U;
        for (std::uint64_t pred : {node >> 1, (node >> 1) | top}) {
            if (fire_u64(pred) != b || std::binary_search(cycle.begin(), cycle.end(), pred)) continue;
            if (out.size() >= limit) break;
            out.emplace_back(StateWindow::from_u64(k, pred), depth + 1);
            frontier.emplace_back(pred, depth + 1);
        }
    }
    return out;
}

}  // namespace nre
