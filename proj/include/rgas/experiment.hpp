#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace rgas {

// Flat TOML-like configuration: "key = value" lines, optional [section]
// headers that prefix the keys that follow as "section.key", # comments.
// Values stay strings until a typed getter parses them; lists are
// comma-separated. The schema per experiment kind is documented in
// configs/README.md.
class Config {
  public:
    static Config parse(std::istream& is);
    static Config from_string(const std::string& text);
    static Config load(const std::filesystem::path& file);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    // required-key getters throw std::invalid_argument; the two-argument
    // forms fall back to the default
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;
    std::vector<double> get_list(const std::string& key) const;
    std::vector<long> get_long_list(const std::string& key) const;

    // sorted "key = value" lines; execution-only keys (workers, output_dir)
    // are excluded so the content hash tracks what affects the numbers
    std::string canonical() const;
    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

// Numeric result table; columns are fixed at construction so emitted CSV
// column order is stable.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}
    void add(std::vector<double> row);
};

// 17 significant digits, enough to reproduce the double bit-for-bit
std::string format_g17(double x);
std::string to_csv(const Table& t);
Table csv_parse(std::istream& is);

std::uint64_t fnv1a(std::string_view s);
std::string hex64(std::uint64_t v);

enum class ExperimentKind {
    simulate,
    idealized,
    compare,
    tree_stats,
    bound_audit,
    plan,
    kappa,
    heat_limit,
};

ExperimentKind experiment_kind(const std::string& name);  // throws on unknown
std::string experiment_name(ExperimentKind kind);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::plan;
    Config config;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct ExperimentOutcome {
    bool passed = true;
    std::vector<std::string> failures;  // named assertions that failed
    std::vector<std::string> files;     // files written, relative to out_dir
};

// Run one experiment: compute, write manifest.json plus the kind's CSV and
// NDJSON outputs into spec.out_dir, and evaluate the embedded assertions.
// Outputs are deterministic functions of (kind, config, seed), independent
// of the worker count.
ExperimentOutcome run_experiment(const ExperimentSpec& spec);

struct PhaseHistogram;

// Collapse a phase-space histogram onto speed shells of the given width
// (per spatial box, overflow slot kept as its own group). Comparing two
// histograms after pushing both through this map removes any per-cell
// alignment question: only shell totals are compared.
std::vector<double> shell_masses(const PhaseHistogram& h, double width);

// Index-ordered parallel map: results land in slot i no matter which worker
// computed them, so reductions over the returned vector are fixed-order.
template <class R, class Fn>
std::vector<R> parallel_map(long count, int workers, Fn fn) {
    std::vector<R> out(count);
    if (workers <= 1) {
        for (long i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<long> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                long i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace rgas
