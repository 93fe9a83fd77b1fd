// Command-line front end: analyze / synth / learn / verify / gen / selftest.
// Reports are line-oriented KEY VALUE pairs (machine-parsable); --pretty
// renders the same pairs as an aligned table. Exit codes: 0 success,
// 1 check or verification failure, 2 usage error.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "spectral/io.hpp"
#include "spectral/km.hpp"
#include "spectral/pdt.hpp"
#include "spectral/restriction.hpp"
#include "spectral/zp.hpp"

namespace {

using namespace spectral;

class Report {
  public:
    explicit Report(bool pretty) : pretty_(pretty) {}

    template <class T>
    void line(const std::string& key, const T& value) {
        std::ostringstream os;
        os << value;
        rows_.emplace_back(key, os.str());
        if (!pretty_) std::cout << key << " " << os.str() << "\n";
    }

    ~Report() {
        if (!pretty_) return;
        std::size_t width = 0;
        for (const auto& [k, v] : rows_) width = std::max(width, k.size());
        for (const auto& [k, v] : rows_)
            std::cout << k << std::string(width - k.size() + 2, ' ') << v << "\n";
    }

  private:
    bool pretty_;
    std::vector<std::pair<std::string, std::string>> rows_;
};

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t seed, bool ci,
                           Report& report) {
    if (seed_opt->count() == 0) {
        if (ci) throw CLI::ValidationError("--seed is required with --ci");
        seed = std::random_device{}();
    }
    report.line("SEED", seed);
    return seed;
}

double measured_dist(const BooleanFunction& f, const ParityDecisionTree& t) {
    std::size_t mismatches = 0;
    for (std::size_t x = 0; x < f.size(); ++x)
        mismatches += f(static_cast<Mask>(x)) != evaluate(t, static_cast<Mask>(x));
    return static_cast<double>(mismatches) / static_cast<double>(f.size());
}

double measured_dist_p(const zp::ZpFunction& f, const zp::PAryPdt& t) {
    std::size_t mismatches = 0;
    for (std::size_t x = 0; x < f.size(); ++x)
        mismatches += f(static_cast<zp::Code>(x)) != evaluate_p(t, static_cast<zp::Code>(x));
    return static_cast<double>(mismatches) / static_cast<double>(f.size());
}

int run_analyze(const std::string& in_path, const std::string& out_path,
                const std::string& subspace_path, const std::string& mode, bool pretty) {
    Report report(pretty);
    io::AnyFunction any = io::read_function_file(in_path);
    report.line("P", any.p());
    report.line("N", any.n());
    if (any.f2) {
        Spectrum s = wht_forward(*any.f2);
        report.line("A", spectral_norm(s).to_string());
        report.line("SPAR", sparsity(s));
        report.line("BIAS", s.coeff(0).abs().to_string());
        if (sparsity(s) >= 2) {
            TopTwo top = top_two(s);
            report.line("TOP1", io::mask_to_string(top.alpha, s.n()) + " " +
                                    s.coeff(top.alpha).to_string());
            report.line("TOP2", io::mask_to_string(top.beta, s.n()) + " " +
                                    s.coeff(top.beta).to_string());
        } else {
            Mask alpha = 0;
            for (std::size_t a = 0; a < s.size(); ++a)
                if (s.scaled(static_cast<Mask>(a)) != 0) alpha = static_cast<Mask>(a);
            report.line("TOP1", io::mask_to_string(alpha, s.n()) + " " +
                                    s.coeff(alpha).to_string());
        }
        if (!out_path.empty()) {
            io::write_file(out_path, io::write_spectrum(s));
            report.line("OUT", out_path);
        }
        if (!subspace_path.empty()) {
            AffineRestriction r = find_constant_subspace(
                s, mode == "accelerated" ? SubspaceMode::Accelerated : SubspaceMode::Basic);
            io::write_file(subspace_path, io::write_restriction(r, s.n()));
            report.line("CODIM", r.co_dimension());
            report.line("CODIM_BOUND", spectral_norm(s).ceil_square());
            report.line("SUBSPACE", subspace_path);
        }
    } else {
        if (!out_path.empty())
            throw ParamError("the SPEC dump format is defined for p=2 tables only");
        if (!subspace_path.empty())
            throw ParamError("--subspace certificates are produced for p=2 tables only");
        zp::ZpSpectrum s = zp::dft_forward(*any.fp);
        std::ostringstream a;
        a.precision(12);
        a << zp::spectral_norm(s);
        report.line("A", a.str());
        report.line("SPAR", zp::sparsity(s));
        std::ostringstream bias;
        bias.precision(12);
        bias << std::abs(s.coeff(0));
        report.line("BIAS", bias.str());
        // Top two coefficient magnitudes, tau-aware ties by ascending index.
        zp::Code alpha = 0, beta = 0;
        double best = -1, second = -1;
        for (std::size_t i = 0; i < s.size(); ++i) {
            double mag = std::abs(s.coeff(static_cast<zp::Code>(i)));
            if (mag > best + zp::kTau) {
                second = best;
                beta = alpha;
                best = mag;
                alpha = static_cast<zp::Code>(i);
            } else if (mag > second + zp::kTau) {
                second = mag;
                beta = static_cast<zp::Code>(i);
            }
        }
        std::ostringstream t1, t2;
        t1.precision(12);
        t2.precision(12);
        t1 << io::code_to_string(alpha, any.n(), any.p()) << " " << best;
        report.line("TOP1", t1.str());
        if (second > zp::kTau) {
            t2 << io::code_to_string(beta, any.n(), any.p()) << " " << second;
            report.line("TOP2", t2.str());
        }
    }
    return 0;
}

int run_synth(const std::string& type, const std::string& in_path, const std::string& out_path,
              double eps, bool pretty) {
    Report report(pretty);
    io::AnyFunction any = io::read_function_file(in_path);
    report.line("P", any.p());
    report.line("N", any.n());
    report.line("MODE", type);
    bool pass = true;
    if (any.f2) {
        Spectrum s = wht_forward(*any.f2);
        const double a = spectral_norm(s).to_double();
        report.line("A", spectral_norm(s).to_string());
        if (type == "exact") {
            ParityDecisionTree t = synth_exact(s);
            report.line("SIZE", t.size());
            report.line("DEPTH", t.depth());
            const double bound = std::exp2(a * a) * std::pow(any.n(), 2 * a);
            report.line("SIZE_BOUND", bound);
            double dist = measured_dist(*any.f2, t);
            report.line("DIST", dist);
            pass = static_cast<double>(t.size()) <= bound && dist == 0.0;
            report.line("BOUND_CHECK", pass ? "PASS" : "FAIL");
            io::write_file(out_path, io::write_pdt(t));
        } else if (type == "sparse") {
            ParityDecisionTree t = synth_sparse_depth(s);
            report.line("SIZE", t.size());
            report.line("DEPTH", t.depth());
            const std::int64_t spar = sparsity(s);
            const double bound = spar == 1
                                     ? 1.0
                                     : double(spectral_norm(s).ceil_square()) *
                                           std::ceil(std::log2(double(spar)));
            report.line("DEPTH_BOUND", bound);
            double dist = measured_dist(*any.f2, t);
            report.line("DIST", dist);
            pass = t.depth() <= bound && dist == 0.0;
            report.line("BOUND_CHECK", pass ? "PASS" : "FAIL");
            io::write_file(out_path, io::write_pdt(t));
        } else {
            FunctionalPdt t = synth_approx(s, eps);
            report.line("SIZE", t.size());
            report.line("DEPTH", t.depth());
            const double bound = std::ceil(std::max(10 * a * a, 2 * std::log2(2.0 / eps)));
            report.line("DEPTH_BOUND", bound);
            double dist = measured_dist(*any.f2, round_to_pdt(t));
            report.line("DIST", dist);
            pass = t.depth() <= bound && dist <= eps;
            report.line("BOUND_CHECK", pass ? "PASS" : "FAIL");
            io::write_file(out_path, io::write_functional_pdt(t));
        }
    } else {
        zp::ZpSpectrum s = zp::dft_forward(*any.fp);
        const double a = zp::spectral_norm(s);
        zp::PAryPdt t = type == "exact"    ? zp::synth_pdt_p(s)
                        : type == "sparse" ? zp::synth_sparse_p(s)
                                           : zp::synth_approx_p(s, eps);
        report.line("SIZE", t.size());
        report.line("DEPTH", t.depth());
        if (type == "approx") {
            const double bound = std::ceil(20.0 / zp::kC0 * (a * a + std::log2(2.0 / eps)));
            report.line("DEPTH_BOUND", bound);
            double dist = measured_dist_p(*any.fp, t);
            report.line("DIST", dist);
            pass = t.depth() <= bound && dist <= eps;
        } else {
            double dist = measured_dist_p(*any.fp, t);
            report.line("DIST", dist);
            pass = dist == 0.0;
        }
        report.line("BOUND_CHECK", pass ? "PASS" : "FAIL");
        io::write_file(out_path, io::write_pary_pdt(t));
    }
    report.line("OUT", out_path);
    return pass ? 0 : 1;
}

int run_learn(const std::string& in_path, const std::string& out_path, double eps, double delta,
              const CLI::Option* seed_opt, std::uint64_t seed, double abound,
              const LearnOptions& options, bool ci, bool pretty) {
    io::AnyFunction any = io::read_function_file(in_path);
    if (!any.f2) throw ParamError("learn supports p=2 truth tables only");
    std::string tree_text;
    {
        Report report(pretty);
        seed = resolve_seed(seed_opt, seed, ci, report);

        Spectrum s = wht_forward(*any.f2);
        if (abound <= 0) abound = spectral_norm(s).to_double();
        report.line("ABOUND", abound);

        TableOracle oracle(*any.f2);
        LearnResult result = learn_approx_pdt(oracle, any.n(), abound, eps, delta, seed, options);
        report.line("QUERIES", result.queries);
        report.line("DEPTH", result.tree.depth());
        report.line("SIZE", result.tree.size());
        report.line("DIST", measured_dist(*any.f2, result.tree));
        tree_text = io::write_pdt(result.tree);
        if (!out_path.empty()) report.line("OUT", out_path);
    }
    // Report format: summary lines followed by the tree itself (or a file).
    if (out_path.empty())
        std::cout << tree_text;
    else
        io::write_file(out_path, tree_text);
    return 0;
}

int run_verify(const std::string& tree_path, const std::string& in_path, double eps,
               bool has_eps, bool pretty) {
    Report report(pretty);
    io::AnyFunction any = io::read_function_file(in_path);
    io::AnyTree tree = io::read_tree_file(tree_path);
    report.line("P", any.p());
    report.line("N", any.n());

    double dist = 0;
    std::size_t points = 0;
    if (any.f2) {
        ParityDecisionTree t = tree.pdt ? std::move(*tree.pdt)
                               : tree.fpdt
                                   ? round_to_pdt(*tree.fpdt)
                                   : throw ParamError("tree file does not match a p=2 function");
        if (t.n() != any.n()) throw ParamError("tree and function dimensions differ");
        if (tree.fpdt) report.line("ROUNDED", 1);
        points = std::size_t(1) << any.n();
        dist = measured_dist(*any.f2, t);
    } else {
        if (!tree.pary) throw ParamError("tree file does not match the function's p");
        if (tree.pary->p() != any.p() || tree.pary->n() != any.n())
            throw ParamError("tree and function shapes differ");
        points = any.fp->size();
        dist = measured_dist_p(*any.fp, *tree.pary);
    }
    report.line("POINTS", points);
    report.line("DIST", dist);
    bool pass = has_eps ? dist <= eps : dist == 0.0;
    report.line("RESULT", has_eps ? (pass ? "PASS" : "FAIL")
                                  : (pass ? "EQUIVALENT" : "DIFFERENT"));
    return pass ? 0 : 1;
}

int run_gen(const std::string& kind, int n, std::uint32_t mask, int k, std::int64_t size,
            const CLI::Option* seed_opt, std::uint64_t seed, const std::string& out_path, bool ci,
            bool pretty) {
    Report report(pretty);
    GenKind g;
    bool randomized = false;
    if (kind == "and")
        g = GenKind::And;
    else if (kind == "or")
        g = GenKind::Or;
    else if (kind == "majority")
        g = GenKind::Majority;
    else if (kind == "parity")
        g = GenKind::Parity;
    else if (kind == "subspace") {
        g = GenKind::SubspaceIndicator;
        randomized = true;
    } else if (kind == "random_pdt") {
        g = GenKind::RandomPdt;
        randomized = true;
    } else {
        g = GenKind::Random;
        randomized = true;
    }
    if (randomized) seed = resolve_seed(seed_opt, seed, ci, report);
    BooleanFunction f = gen(g, n, GenParams{mask, k, size}, seed);
    io::write_file(out_path, io::write_boolfn(f));
    report.line("KIND", kind);
    report.line("N", n);
    report.line("OUT", out_path);
    return 0;
}

// Desk-scale sweeps of the library's own guarantees; every *_CHECK the
// library performs at runtime throws on violation, so reaching the end of a
// block is the pass signal.
int run_selftest(std::uint64_t seed, bool pretty) {
    Report report(pretty);
    std::mt19937_64 rng(seed);

    auto random_function = [&rng](int n) {
        std::vector<std::int8_t> values(std::size_t(1) << n);
        for (auto& v : values) v = (rng() & 1) ? -1 : 1;
        return BooleanFunction(n, std::move(values));
    };
    auto function_by_index = [](int n, std::uint64_t idx) {
        std::vector<std::int8_t> values(std::size_t(1) << n);
        for (std::size_t x = 0; x < values.size(); ++x)
            values[x] = (idx >> x) & 1 ? -1 : 1;
        return BooleanFunction(n, std::move(values));
    };

    bool all_ok = true;
    auto run_block = [&](const char* name, auto&& body) {
        try {
            body();
            report.line(std::string("SELFTEST ") + name, "PASS");
        } catch (const std::exception& e) {
            report.line(std::string("SELFTEST ") + name, std::string("FAIL ") + e.what());
            all_ok = false;
        }
    };

    run_block("transform", [&] {
        for (int n = 1; n <= 3; ++n)
            for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << (1 << n)); ++idx) {
                BooleanFunction f = function_by_index(n, idx);
                Spectrum s = wht_forward(f);
                check(s.parseval_ok(), "parseval");
                check(wht_inverse(s) == f, "round trip");
                for (Mask delta = 1; delta < s.size(); ++delta)
                    check(convolution_check(s, delta) == 0, "convolution");
            }
        for (int n = 10; n <= 12; ++n) {
            BooleanFunction f = random_function(n);
            check(wht_inverse(wht_forward(f)) == f, "round trip");
        }
    });

    run_block("restriction", [&] {
        for (std::uint64_t idx = 0; idx < 65536; idx += 17) {
            Spectrum s = wht_forward(function_by_index(4, idx));
            if (spectral_norm(s) > Dyadic::from_int(1)) main_lemma_step(s);
            find_constant_subspace(s, SubspaceMode::Basic);
            find_constant_subspace(s, SubspaceMode::Accelerated);
        }
    });

    run_block("synthesis", [&] {
        for (std::uint64_t idx = 0; idx < 256; ++idx) {
            BooleanFunction f = function_by_index(3, idx);
            Spectrum s = wht_forward(f);
            ParityDecisionTree exact = synth_exact(s);
            ParityDecisionTree sparse = synth_sparse_depth(s);
            for (Mask x = 0; x < f.size(); ++x) {
                check(evaluate(exact, x) == f(x), "exact equivalence");
                check(evaluate(sparse, x) == f(x), "sparse equivalence");
            }
            check_simple_facts(exact);
        }
        for (int trial = 0; trial < 30; ++trial) {
            BooleanFunction f = random_function(6);
            FunctionalPdt ft = synth_approx(wht_forward(f), 0.1);
            ParityDecisionTree rounded = round_to_pdt(ft);
            std::size_t mismatches = 0;
            for (Mask x = 0; x < f.size(); ++x) mismatches += evaluate(rounded, x) != f(x);
            check(double(mismatches) / double(f.size()) <= 0.1, "approx distance");
        }
    });

    run_block("search", [&] {
        for (int trial = 0; trial < 10; ++trial) {
            BooleanFunction f = random_function(3);
            Spectrum s = wht_forward(f);
            TableOracle oracle(f);
            SearchParams p{.theta = 0.3, .eta = 0.15, .delta = 0.01,
                           .seed = rng(), .force_sampling = true};
            SearchResult res = km_search(oracle, 3, p);
            for (std::size_t a = 0; a < s.size(); ++a) {
                if (std::abs(s.coeff(static_cast<Mask>(a)).to_double()) < 0.3) continue;
                bool found = false;
                for (const auto& h : res.hits) found |= h.alpha == a;
                check(found, "km completeness");
            }
        }
        TableOracle oracle(gen(GenKind::Majority, 5));
        LearnResult lr = learn_approx_pdt(oracle, 5, 3.5, 0.1, 0.05, rng());
        std::size_t mismatches = 0;
        BooleanFunction maj = gen(GenKind::Majority, 5);
        for (Mask x = 0; x < maj.size(); ++x) mismatches += evaluate(lr.tree, x) != maj(x);
        check(double(mismatches) / double(maj.size()) <= 0.1, "learn distance");
    });

    run_block("zp", [&] {
        auto zp_by_index = [](std::uint64_t idx) {
            std::vector<std::int8_t> values(9);
            for (std::size_t x = 0; x < 9; ++x) values[x] = (idx >> x) & 1 ? -1 : 1;
            return zp::ZpFunction(3, 2, std::move(values));
        };
        for (std::uint64_t idx = 0; idx < 512; ++idx) {
            zp::ZpFunction f = zp_by_index(idx);
            zp::ZpSpectrum s = zp::dft_forward(f);
            check(s.conjugate_symmetric(), "conjugate symmetry");
            check(s.parseval_ok(), "parseval");
            for (zp::Code beta = 1; beta < 9; ++beta)
                check(std::abs(zp::convolution_check_p(s, beta)) <= zp::kTau * 9, "convolution");
            if (zp::spectral_norm(s) > 1 + zp::kTau) zp::main_lemma_step_p(s);
            for (zp::Code eta = 1; eta < 9; ++eta)
                for (int lambda = 0; lambda < 3; ++lambda) zp::overcount_check(s, eta, lambda);
            zp::PAryPdt t = zp::synth_pdt_p(s);
            for (zp::Code x = 0; x < 9; ++x)
                check(zp::evaluate_p(t, x) == f(x), "p-ary equivalence");
        }
    });

    report.line("RESULT", all_ok ? "PASS" : "FAIL");
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier analysis of Boolean functions and parity decision tree synthesis"};
    app.require_subcommand(1);
    bool pretty = false, ci = false;
    app.add_flag("--pretty", pretty, "Render reports as an aligned table");
    app.add_flag("--ci", ci, "Require explicit --seed for randomized commands");

    std::string in_path, out_path, tree_path, subspace_path, mode = "basic", synth_type, kind;
    double eps = 0.1, delta = 0.05, theta = 0, eta = 0;
    std::uint64_t seed = 0;
    double abound = 0;
    int n = 0, k = 1;
    std::uint32_t mask = 0;
    std::int64_t size = 4;

    CLI::App* analyze = app.add_subcommand("analyze", "Print spectral statistics");
    analyze->add_option("--in", in_path, "Truth table file")->required();
    analyze->add_option("--out", out_path, "Write the spectrum dump here");
    analyze->add_option("--subspace", subspace_path, "Write a constant-subspace certificate");
    analyze->add_option("--mode", mode, "Subspace search mode")
        ->check(CLI::IsMember({"basic", "accelerated"}));

    CLI::App* synth = app.add_subcommand("synth", "Synthesize a parity decision tree");
    synth->add_option("type", synth_type, "exact | sparse | approx")
        ->required()
        ->check(CLI::IsMember({"exact", "sparse", "approx"}));
    synth->add_option("--in", in_path, "Truth table file")->required();
    synth->add_option("--out", out_path, "Tree output file")->required();
    synth->add_option("--eps", eps, "Approximation error (approx only)");

    CLI::App* learn = app.add_subcommand("learn", "Learn an approximating tree from queries");
    learn->add_option("--in", in_path, "Truth table file backing the oracle")->required();
    learn->add_option("--out", out_path, "Tree output file (default: print after the report)");
    learn->add_option("--eps", eps, "Target distance");
    learn->add_option("--delta", delta, "Failure probability");
    CLI::Option* learn_seed = learn->add_option("--seed", seed, "RNG seed");
    learn->add_option("--abound", abound, "Upper bound on the spectral norm (default: exact)");
    learn->add_option("--theta", theta, "Override the derived search threshold");
    learn->add_option("--eta", eta, "Override the derived estimate accuracy");

    CLI::App* verify = app.add_subcommand("verify", "Check a tree against a truth table");
    verify->add_option("--tree", tree_path, "Tree file")->required();
    verify->add_option("--in", in_path, "Truth table file")->required();
    CLI::Option* verify_eps = verify->add_option("--eps", eps, "Allowed distance");

    int gen_p = 2;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Emit a test function");
    gen_cmd->add_option("--kind", kind, "Function family")
        ->required()
        ->check(CLI::IsMember({"and", "or", "majority", "parity", "subspace", "random_pdt",
                               "random"}));
    gen_cmd->add_option("--p", gen_p, "Field characteristic (only 2 is generated)")
        ->check(CLI::IsMember({2}));
    gen_cmd->add_option("--n", n, "Dimension")->required();
    gen_cmd->add_option("--mask", mask, "Parity mask");
    gen_cmd->add_option("--k", k, "Subspace co-dimension");
    gen_cmd->add_option("--size", size, "Random tree leaf count");
    CLI::Option* gen_seed = gen_cmd->add_option("--seed", seed, "RNG seed");
    gen_cmd->add_option("--out", out_path, "Output file")->required();

    CLI::App* selftest = app.add_subcommand("selftest", "Run the desk-scale invariant sweeps");
    selftest->add_option("--seed", seed, "RNG seed for the sampled parts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*analyze) return run_analyze(in_path, out_path, subspace_path, mode, pretty);
        if (*synth) {
            if (synth_type == "approx" && !(eps > 0 && eps < 0.5))
                throw ParamError("--eps must be in (0, 1/2)");
            return run_synth(synth_type, in_path, out_path, eps, pretty);
        }
        if (*learn) {
            if (!(eps > 0 && eps < 0.5)) throw ParamError("--eps must be in (0, 1/2)");
            if (!(delta > 0 && delta < 1)) throw ParamError("--delta must be in (0, 1)");
            return run_learn(in_path, out_path, eps, delta, learn_seed, seed, abound,
                             LearnOptions{theta, eta}, ci, pretty);
        }
        if (*verify)
            return run_verify(tree_path, in_path, eps, verify_eps->count() > 0, pretty);
        if (*gen_cmd) return run_gen(kind, n, mask, k, size, gen_seed, seed, out_path, ci, pretty);
        if (*selftest) return run_selftest(seed, pretty);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
