// experiments.hpp -- the experiment harness behind the CLI and the
// acceptance suite: seeded parallel Monte Carlo runs, their reductions, and
// the deterministic numerical experiments, with CSV/JSON emission.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ssep/hydro.hpp"
#include "ssep/io.hpp"
#include "ssep/lattice.hpp"
#include "ssep/minimize.hpp"
#include "ssep/profile.hpp"
#include "ssep/simulator.hpp"
#include "ssep/stats.hpp"
#include "ssep/threads.hpp"
#include "ssep/trialbounds.hpp"
#include "ssep/varprob.hpp"

namespace ssep {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// flat key = value config files with one [section] per experiment
// ---------------------------------------------------------------------------

using KvMap = std::map<std::string, std::string>;

inline KvMap parse_config_section(std::istream& in, const std::string& section) {
    KvMap kv;
    std::string line, current;
    bool seen = false;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            current = trim(line.substr(1, line.size() - 2));
            if (current == section) seen = true;
            continue;
        }
        if (current != section) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key");
        kv[key] = val;
    }
    if (!section.empty() && !seen && !kv.empty())
        throw ConfigError("config: section [" + section + "] not found");
    return kv;
}

inline KvMap parse_config_file(const std::string& path, const std::string& section) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    return parse_config_section(in, section);
}

class KvReader {
  public:
    explicit KvReader(KvMap kv) : kv_(std::move(kv)) {}

    std::string str(const std::string& key, const std::string& def) {
        used_.insert(key);
        const auto it = kv_.find(key);
        return it == kv_.end() ? def : it->second;
    }
    double num(const std::string& key, double def, bool require_positive = true) {
        const std::string s = str(key, format_double(def));
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config: bad number for " + key + ": " + s);
        }
        if (pos != s.size()) throw ConfigError("config: bad number for " + key + ": " + s);
        if (require_positive && !(v > 0.0))
            throw ConfigError("config: " + key + " must be positive");
        return v;
    }
    long long integer(const std::string& key, long long def, bool require_positive = true) {
        const double v = num(key, static_cast<double>(def), require_positive);
        if (v != std::floor(v)) throw ConfigError("config: " + key + " must be an integer");
        return static_cast<long long>(v);
    }
    std::vector<double> num_list(const std::string& key, const std::string& def) {
        std::istringstream in(str(key, def));
        std::vector<double> out;
        double v;
        while (in >> v) out.push_back(v);
        if (!in.eof()) throw ConfigError("config: bad list for " + key);
        if (out.empty()) throw ConfigError("config: empty list for " + key);
        return out;
    }
    void reject_unknown() const {
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) throw ConfigError("config: unknown key '" + k + "'");
    }
    const KvMap& raw() const { return kv_; }

  private:
    KvMap kv_;
    std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Monte Carlo experiments
// ---------------------------------------------------------------------------

struct SampleRow {
    std::uint64_t index = 0;
    double t = 0.0;
    long long J = 0;
    int X = 0;
    bool flag = false;
    double compensator = 0.0;
};

struct McSummary {
    std::size_t samples = 0;
    RunningStats J_stats, X_stats, comp_residual_stats;
    double flag_rate = 0.0;
    long long max_abs_J = 0;
};

enum class StartKind { dic, lem };

// Runs `samples` independent trajectories from the given initial-state recipe
// and reduces (J, X) at the final time. Rows are optionally collected for CSV
// emission (always ordered by sample index).
inline McSummary monte_carlo(const Profile& p, StartKind start, double N, double t_phys, int W,
                             std::size_t samples, std::uint64_t seed, int threads,
                             std::vector<SampleRow>* rows = nullptr) {
    const Configuration dic_init = start == StartKind::dic ? make_dic(p, N, W) : Configuration{};
    std::vector<SampleRow> local(samples);
    parallel_for(samples, threads, [&](std::size_t i) {
        SimConfig cfg;
        cfg.t_phys = t_phys;
        cfg.W = W;
        cfg.master_seed = seed;
        cfg.sample_index = i;
        Configuration init;
        if (start == StartKind::dic) {
            init = dic_init;
        } else {
            Rng rng(seed ^ 0x5851f42d4c957f2dull, i);  // initial-state stream
            init = sample_lem(p, N, W, rng);
        }
        const TrajectorySample s = run(cfg, init);
        const Checkpoint& last = s.checkpoints.back();
        local[i] = SampleRow{i, last.t, last.J_origin, last.X, s.boundary_flag,
                             last.compensator};
    });
    McSummary sum;
    sum.samples = samples;
    std::size_t flagged = 0;
    for (const auto& r : local) {
        sum.J_stats.add(static_cast<double>(r.J));
        sum.X_stats.add(static_cast<double>(r.X));
        sum.comp_residual_stats.add(static_cast<double>(r.J) - r.compensator);
        sum.max_abs_J = std::max(sum.max_abs_J, std::llabs(r.J));
        if (r.flag) ++flagged;
    }
    sum.flag_rate = static_cast<double>(flagged) / static_cast<double>(samples);
    if (rows) *rows = std::move(local);
    return sum;
}

// --- exact identity suite ---------------------------------------------------

struct IdentityReport {
    std::size_t samples = 0;
    std::size_t telescoping_fail = 0;
    std::size_t relation_fail = 0;
    std::size_t cutoff_fail = 0;
    std::size_t order_fail = 0;
    std::size_t bound_fail = 0;
    std::size_t conservation_fail = 0;
    bool all_pass() const {
        return telescoping_fail + relation_fail + cutoff_fail + order_fail + bound_fail +
                   conservation_fail ==
               0;
    }
};

inline std::vector<std::pair<std::string, Profile>> identity_suite_profiles() {
    return {
        {"constant 0.5", Profile::constant(0.5)},
        {"step 0.8 0.2", Profile::step(0.8, 0.2)},
        {"step 0.35 0.65", Profile::step(0.35, 0.65)},
        {"indicator -1 1", Profile::indicator(-1.0, 1.0)},
        {"table 0.3 0.6 -1 0.3 0 0.9 1 0.6",
         Profile::table(0.3, 0.6, {-1.0, 0.0, 1.0}, {0.3, 0.9, 0.6})},
    };
}

inline IdentityReport identity_suite_one_profile(const Profile& p, std::size_t samples,
                                                 std::uint64_t seed, int threads,
                                                 bool lem_start = false) {
    const double N = 8.0, T_macro = 0.6;
    const int cutoff_n = 2;
    const int nN = static_cast<int>(cutoff_n * N);
    const int W = std::max(default_window(p, N, T_macro), nN + 8);
    const double t_phys = N * N * T_macro;

    std::vector<IdentityReport> partial(samples);
    parallel_for(samples, threads, [&](std::size_t i) {
        SimConfig cfg;
        cfg.t_phys = t_phys;
        cfg.W = W;
        cfg.master_seed = seed;
        cfg.sample_index = i;
        cfg.checkpoints = {0.37 * t_phys, t_phys};
        cfg.store_occupancy = true;
        cfg.store_all_bonds = true;
        Configuration init;
        if (lem_start) {
            Rng rng(seed ^ 0x5851f42d4c957f2dull, i);
            init = sample_lem(p, N, W, rng);
        } else {
            init = make_dic(p, N, W);
        }
        const long long left0 = init.count_in(-W, -1);
        const long long right0 = init.count_in(0, W);
        const long long total0 = init.particle_count();

        const TrajectorySample s = run(cfg, init);
        IdentityReport rep;
        rep.samples = 1;
        for (const auto& rec : s.checkpoints) {
            // bond-current telescoping at every interior site
            for (int x = -W + 1; x <= W - 1; ++x) {
                const long long lhs = rec.all_bonds[static_cast<std::size_t>(x - 1 + W)] -
                                      rec.all_bonds[static_cast<std::size_t>(x + W)];
                if (lhs != static_cast<long long>(rec.occupancy.at(x)) -
                               static_cast<long long>(init.at(x))) {
                    ++rep.telescoping_fail;
                    break;
                }
            }
            // conservation and single-file order
            if (rec.occupancy.particle_count() != total0) ++rep.conservation_fail;
            if (rec.occupancy.at(rec.X) != 1 ||
                rec.occupancy.count_in(-W, rec.X - 1) != left0)
                ++rep.order_fail;
            // current bounded by the initial particle counts on each side
            if (rec.J_origin > left0 || rec.J_origin < -right0) ++rep.bound_fail;
        }
        for (int r = -3; r <= 3; ++r)
            if (!check_tagged_current_relation(s, r)) {
                ++rep.relation_fail;
                break;
            }
        for (std::size_t c = 0; c < s.checkpoints.size(); ++c)
            if (std::abs(cutoff_decomposition(s, c, cutoff_n, N)) > 1e-9) {
                ++rep.cutoff_fail;
                break;
            }
        partial[i] = rep;
    });

    IdentityReport total;
    for (const auto& r : partial) {
        total.samples += r.samples;
        total.telescoping_fail += r.telescoping_fail;
        total.relation_fail += r.relation_fail;
        total.cutoff_fail += r.cutoff_fail;
        total.order_fail += r.order_fail;
        total.bound_fail += r.bound_fail;
        total.conservation_fail += r.conservation_fail;
    }
    return total;
}

// --- rare-event tail fitting -------------------------------------------------

struct LdpFitResult {
    double a = 0.0;
    std::vector<double> N_list;
    std::vector<TailEstimate> estimates;
    bool fitted = false;
    double slope = 0.0;     // fitted d log p / d N  (estimates -J(a) or -I(a))
    double slope_se = 0.0;
    std::string refusal;    // nonempty when the fit was refused
};

// P(J/N >= a) (or the X analog) per N by direct Monte Carlo, weighted
// least-squares fit of log p against N. Refuses to fit undersampled tails
// (fewer than 20 successes at any N). samples_list is broadcast when it has
// one entry; rarer tails at larger N usually get more samples.
inline LdpFitResult ldp_fit(const Profile& p, double T, double a, bool tagged_observable,
                            const std::vector<double>& N_list,
                            std::vector<std::size_t> samples_list, std::uint64_t seed,
                            int threads, StartKind start = StartKind::dic) {
    LdpFitResult out;
    out.a = a;
    out.N_list = N_list;
    if (samples_list.size() == 1) samples_list.assign(N_list.size(), samples_list.front());
    if (samples_list.size() != N_list.size())
        throw std::invalid_argument("ldp_fit: samples list shape");
    for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
        const double N = N_list[ni];
        const std::size_t samples = samples_list[ni];
        const int W = default_window(p, N, T);
        const double t_phys = N * N * T;
        std::vector<std::uint8_t> hit(samples, 0);
        const Configuration dic_init = start == StartKind::dic ? make_dic(p, N, W)
                                                               : Configuration{};
        parallel_for(samples, threads, [&](std::size_t i) {
            SimConfig cfg;
            cfg.t_phys = t_phys;
            cfg.W = W;
            cfg.master_seed = seed ^ fnv1a("N=" + format_double(N));
            cfg.sample_index = i;
            Configuration init;
            if (start == StartKind::dic) {
                init = dic_init;
            } else {
                Rng rng(seed ^ 0x5851f42d4c957f2dull, i);
                init = sample_lem(p, N, W, rng);
            }
            const TrajectorySample s = run(cfg, init);
            const Checkpoint& last = s.checkpoints.back();
            const double scaled = tagged_observable ? static_cast<double>(last.X) / N
                                                    : static_cast<double>(last.J_origin) / N;
            hit[i] = scaled >= a ? 1 : 0;
        });
        std::size_t successes = 0;
        for (auto h : hit) successes += h;
        out.estimates.push_back(tail_estimate(successes, samples));
    }
    for (const auto& e : out.estimates) {
        if (e.successes < 20) {
            out.refusal = "undersampled tail: " + std::to_string(e.successes) +
                          " successes; need >= 20 at every N";
            return out;
        }
    }
    std::vector<double> xs, ys, ws;
    for (std::size_t i = 0; i < N_list.size(); ++i) {
        xs.push_back(N_list[i]);
        ys.push_back(out.estimates[i].log_p);
        ws.push_back(1.0 / (out.estimates[i].log_p_se * out.estimates[i].log_p_se));
    }
    const LineFit fit = wls_line(xs, ys, ws);
    out.fitted = true;
    out.slope = fit.slope;
    out.slope_se = fit.slope_se;
    return out;
}

// --- degenerate block profile ------------------------------------------------

struct BlockTailSummary {
    std::vector<double> N_list;
    long long max_abs_J = 0;       // over all runs; exact bound is N
    bool current_within_block = true;
    // per (a, N): tagged tail estimates and the analytic bound at each a
    std::vector<double> a_list;
    std::vector<std::vector<TailEstimate>> tails;  // indexed [a][N]
    std::vector<double> bounds;                    // block_tail_bound(a, T)
};

inline BlockTailSummary block_tail_experiment(double T, const std::vector<double>& N_list,
                                           const std::vector<double>& a_list,
                                           std::size_t samples, std::uint64_t seed, int threads) {
    const Profile block = Profile::indicator(-1.0, 1.0);
    BlockTailSummary out;
    out.N_list = N_list;
    out.a_list = a_list;
    out.tails.assign(a_list.size(), {});
    for (double a : a_list) out.bounds.push_back(block_tail_bound(a, T, RateTarget::tagged));

    for (double N : N_list) {
        const int W = default_window(block, N, T);
        std::vector<SampleRow> rows;
        const McSummary mc = monte_carlo(block, StartKind::dic, N, N * N * T, W, samples,
                                         seed ^ fnv1a("t4N=" + format_double(N)), threads, &rows);
        out.max_abs_J = std::max(out.max_abs_J, mc.max_abs_J);
        if (mc.max_abs_J > static_cast<long long>(N)) out.current_within_block = false;
        for (std::size_t ai = 0; ai < a_list.size(); ++ai) {
            std::size_t hits = 0;
            for (const auto& r : rows)
                if (std::abs(static_cast<double>(r.X)) / N >= a_list[ai]) ++hits;
            out.tails[ai].push_back(tail_estimate(hits, samples));
        }
    }
    return out;
}

}  // namespace ssep
