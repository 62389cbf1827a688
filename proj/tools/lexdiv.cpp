// lexdiv: lexical diversity measurements over token corpora — entropy and TTR
// curves, Zipf/Heaps law fits, asymptotic-relation fits, and synthetic
// Zipfian corpora for validation.
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexdiv/lexdiv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string ids_path(const std::string& base) { return base + ".tokens"; }
std::string vocab_path(const std::string& base) { return base + ".vocab.tsv"; }

void log_config(const std::string& subcommand, const json& cfg) {
    json j{{"config", cfg}};
    j["config"]["subcommand"] = subcommand;
    std::cerr << j.dump() << "\n";
}

void write_json_report(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    lexdiv::AtomicFile f(path);
    f.stream() << j.dump(2) << "\n";
    f.commit();
}

std::vector<std::string> collect_input_files(const std::vector<std::string>& inputs) {
    std::vector<std::string> files;
    for (const auto& in : inputs) {
        fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<std::string> here;
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file()) here.push_back(e.path().generic_string());
            std::sort(here.begin(), here.end());
            files.insert(files.end(), here.begin(), here.end());
        } else if (fs::is_regular_file(p)) {
            files.push_back(p.generic_string());
        } else {
            throw lexdiv::IoError("input not found: " + in);
        }
    }
    if (files.empty()) throw lexdiv::IoError("no input files");
    return files;
}

// Streams ids to disk as they are produced; memory stays O(vocabulary).
void tokenize_to_files(const std::vector<std::string>& files, lexdiv::TokenizerOptions opts,
                       const std::string& base) {
    lexdiv::Encoder enc;
    lexdiv::AtomicFile idsf(ids_path(base));
    std::string placeholder(20, '\0');
    idsf.stream().write(placeholder.data(), 20);
    std::string buf;
    buf.reserve(1u << 16);
    auto emit = [&](std::string_view tok) {
        lexdiv::detail::put_u32(buf, enc.add(tok));
        if (buf.size() >= (1u << 16)) {
            idsf.stream().write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    };
    for (const auto& f : files) lexdiv::tokenize_file(f, opts, emit);
    idsf.stream().write(buf.data(), static_cast<std::streamsize>(buf.size()));

    std::string hdr;
    hdr.append(lexdiv::kMagic, 4);
    hdr.push_back(static_cast<char>(lexdiv::kFormatVersion));
    hdr.push_back(static_cast<char>(lexdiv::pack_options(opts)));
    hdr.push_back(0);
    hdr.push_back(0);
    lexdiv::detail::put_u64(hdr, enc.total());
    lexdiv::detail::put_u32(hdr, static_cast<std::uint32_t>(enc.vocab().size()));
    idsf.stream().seekp(0);
    idsf.stream().write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
    idsf.commit();

    lexdiv::AtomicFile vf(vocab_path(base));
    vf.stream() << "id\ttype\tcount\n";
    for (std::size_t i = 0; i < enc.vocab().size(); ++i)
        vf.stream() << i << '\t' << enc.vocab()[i].type << '\t' << enc.vocab()[i].count << '\n';
    vf.commit();

    json out{{"total_tokens", enc.total()}, {"types", enc.vocab().size()}, {"output", base}};
    std::cout << out.dump() << "\n";
}

void write_tsv(const std::string& path, const std::string& header,
               const std::function<void(std::ofstream&)>& body) {
    lexdiv::AtomicFile f(path);
    f.stream() << header << '\n';
    body(f.stream());
    f.commit();
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json zipf_fit_json(const lexdiv::ZipfFit& z) {
    return json{{"a1", z.a1},           {"a2", z.a2},
                {"log_k1", z.log_k1},   {"log_k2", z.log_k2},
                {"r_c", z.r_c},         {"c1", z.c1},
                {"c2", z.c2},           {"residual", z.residual},
                {"single_regime", z.single_regime}};
}

json relation_fit_json(const lexdiv::RelationFit& f, bool auto_range, bool fallback) {
    const bool hl = f.kind == lexdiv::RelationKind::H_of_L;
    json j{{"kind", hl ? "H_of_L" : "H_of_TTR"},
           {hl ? "p1" : "p3", f.p_first},
           {hl ? "p2" : "p4", f.p_second},
           {"beta_used", f.beta_used},
           {"fit_range", {f.l_low, f.l_high}},
           {"rho2", f.goodness.rho2},
           {"rho_s", f.goodness.rho_s},
           {"rho_d", f.goodness.rho_d},
           {"p_value", f.goodness.p_value}};
    if (auto_range) j["range_fallback"] = fallback;
    return j;
}

struct FitArgs {
    std::string series, out;
    double beta = 0;
    std::uint64_t l_low = 0, l_high = 0;
    double sigma_lo = 0.0025, sigma_hi = 0.025;
    bool use_nsb = false;
};

void add_fit_flags(CLI::App* sc, FitArgs& a) {
    sc->add_option("--series", a.series, "series TSV from `sample`")->required();
    sc->add_option("--beta", a.beta, "Heaps exponent from a prior fit")->required();
    sc->add_option("--l-low", a.l_low, "fit range lower bound (tokens); 0 = auto");
    sc->add_option("--l-high", a.l_high, "fit range upper bound (tokens); 0 = auto");
    sc->add_option("--sigma-lo", a.sigma_lo, "sigma_H band lower edge for auto range");
    sc->add_option("--sigma-hi", a.sigma_hi, "sigma_H band upper edge for auto range");
    sc->add_flag("--nsb", a.use_nsb, "fit the NSB entropy column instead of plug-in");
    sc->add_option("--out", a.out, "report JSON path (default stdout)");
}

void run_fit(const FitArgs& a, lexdiv::RelationKind kind) {
    log_config(kind == lexdiv::RelationKind::H_of_L ? "fit-hl" : "fit-httr",
               json{{"series", a.series},
                    {"beta", a.beta},
                    {"l_low", a.l_low},
                    {"l_high", a.l_high},
                    {"sigma_lo", a.sigma_lo},
                    {"sigma_hi", a.sigma_hi},
                    {"nsb", a.use_nsb}});
    const auto rows = lexdiv::read_series_tsv(a.series);
    std::uint64_t lo = a.l_low, hi = a.l_high;
    const bool auto_range = lo == 0 && hi == 0;
    bool fallback = false;
    if (auto_range) {
        const auto r = lexdiv::select_fit_range(rows, a.sigma_lo, a.sigma_hi);
        lo = r.l_low;
        hi = r.l_high;
        fallback = r.fallback;
    } else if (hi == 0) {
        hi = rows.back().l;
    }
    const auto fit = lexdiv::fit_relation(rows, kind, a.beta, lo, hi, a.use_nsb);
    write_json_report(relation_fit_json(fit, auto_range, fallback), a.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lexical diversity toolkit: word entropy, TTR, Zipf/Heaps laws"};
    app.require_subcommand(1);

    // ---- tokenize ----
    struct {
        std::vector<std::string> inputs;
        std::string out;
        bool turkish = false, keep_numbers = false, strip_accents = false;
    } tok;
    {
        auto* sc = app.add_subcommand("tokenize", "text files/dirs -> corpus files");
        sc->add_option("--input", tok.inputs, "input files or directories (recursed, "
                                             "concatenated in lexicographic path order)")
            ->required();
        sc->add_option("--output", tok.out, "output base path (writes <base>.tokens + "
                                            "<base>.vocab.tsv)")
            ->required();
        sc->add_flag("--turkish", tok.turkish, "Turkish-aware casing (I->dotless i)");
        sc->add_flag("--keep-numbers", tok.keep_numbers, "keep digit characters");
        sc->add_flag("--strip-accents", tok.strip_accents, "remove combining accents");
        sc->callback([&] {
            log_config("tokenize", json{{"inputs", tok.inputs},
                                        {"output", tok.out},
                                        {"turkish", tok.turkish},
                                        {"keep_numbers", tok.keep_numbers},
                                        {"strip_accents", tok.strip_accents}});
            lexdiv::TokenizerOptions opts;
            opts.casing_mode = tok.turkish ? lexdiv::CasingMode::turkish_aware
                                           : lexdiv::CasingMode::unicode_simple;
            opts.strip_numbers = !tok.keep_numbers;
            opts.preserve_accents = !tok.strip_accents;
            tokenize_to_files(collect_input_files(tok.inputs), opts, tok.out);
        });
    }

    // ---- stats ----
    struct {
        std::string corpus;
    } st;
    {
        auto* sc = app.add_subcommand("stats", "corpus summary: L, V, TTR, hapax share");
        sc->add_option("--corpus", st.corpus, "corpus base path")->required();
        sc->callback([&] {
            log_config("stats", json{{"corpus", st.corpus}});
            const auto vocab = lexdiv::read_vocab_tsv(vocab_path(st.corpus));
            std::uint64_t L = 0, V = 0, hapax = 0;
            for (const auto& e : vocab) {
                L += e.count;
                V += e.count > 0;
                hapax += e.count == 1;
            }
            json out{{"total_tokens", L},
                     {"types", V},
                     {"ttr", lexdiv::ttr(V, L)},
                     {"hapax_count", hapax},
                     {"hapax_share", static_cast<double>(hapax) / static_cast<double>(V)}};
            std::cout << out.dump() << "\n";
        });
    }

    // ---- zipf ----
    struct {
        std::string corpus, report, curve;
        lexdiv::ZipfFitConfig cfg;
    } zf;
    {
        auto* sc = app.add_subcommand("zipf", "two-regime rank-frequency fit");
        sc->add_option("--corpus", zf.corpus)->required();
        sc->add_option("--report", zf.report, "fit report JSON path (default stdout)");
        sc->add_option("--curve", zf.curve, "rank-frequency TSV output");
        sc->add_option("--grid-min", zf.cfg.grid_min, "smallest breakpoint candidate");
        sc->add_option("--grid-frac", zf.cfg.grid_max_frac, "largest candidate as fraction of V");
        sc->add_option("--grid-size", zf.cfg.grid_size, "number of log-spaced candidates");
        sc->callback([&] {
            log_config("zipf", json{{"corpus", zf.corpus},
                                    {"grid_min", zf.cfg.grid_min},
                                    {"grid_frac", zf.cfg.grid_max_frac},
                                    {"grid_size", zf.cfg.grid_size}});
            const auto table =
                lexdiv::frequency_table_from_vocab(lexdiv::read_vocab_tsv(vocab_path(zf.corpus)));
            if (!zf.curve.empty())
                write_tsv(zf.curve, "rank\tcount", [&](std::ofstream& o) {
                    for (const auto& e : table.entries) o << e.rank << '\t' << e.count << '\n';
                });
            write_json_report(zipf_fit_json(lexdiv::fit_zipf(table, zf.cfg)), zf.report);
        });
    }

    // ---- heaps ----
    struct {
        std::string corpus, report, curve;
        std::uint64_t step = 0;
    } hp;
    {
        auto* sc = app.add_subcommand("heaps", "vocabulary growth fit V = alpha L^beta");
        sc->add_option("--corpus", hp.corpus)->required();
        sc->add_option("--step", hp.step, "growth curve sampling step (default L/1000)");
        sc->add_option("--report", hp.report, "fit report JSON path (default stdout)");
        sc->add_option("--curve", hp.curve, "growth curve TSV output");
        sc->callback([&] {
            log_config("heaps", json{{"corpus", hp.corpus}, {"step", hp.step}});
            const auto corpus =
                lexdiv::read_corpus(ids_path(hp.corpus), vocab_path(hp.corpus));
            const std::uint64_t step =
                hp.step ? hp.step : std::max<std::uint64_t>(1, corpus.total_tokens / 1000);
            const auto curve = lexdiv::growth_curve(corpus, step);
            if (!hp.curve.empty())
                write_tsv(hp.curve, "l\tv", [&](std::ofstream& o) {
                    for (const auto& p : curve.points)
                        o << p.tokens_read << '\t' << p.vocabulary << '\n';
                });
            const auto fit = lexdiv::fit_heaps(curve);
            write_json_report(json{{"alpha", fit.alpha},
                                   {"beta", fit.beta},
                                   {"stderr_beta", fit.stderr_beta},
                                   {"beta_in_range", fit.beta_in_range},
                                   {"step", step}},
                              hp.report);
        });
    }

    // ---- sample ----
    struct {
        std::string corpus, out;
        lexdiv::SamplePlan plan;
        bool nsb = false;
        unsigned threads = 0;
    } sm;
    {
        auto* sc = app.add_subcommand("sample", "fragment statistics series (H, V, TTR)");
        sc->add_option("--corpus", sm.corpus)->required();
        sc->add_option("--out", sm.out, "series TSV output path")->required();
        sc->add_option("--step", sm.plan.step, "fragment length increment");
        sc->add_option("--reps", sm.plan.replicates, "fragments per length");
        sc->add_option("--seed", sm.plan.seed, "RNG seed");
        sc->add_option("--l-min", sm.plan.l_min, "smallest fragment length (default step)");
        sc->add_option("--l-max", sm.plan.l_max, "largest fragment length (default corpus)");
        sc->add_flag("--nsb", sm.nsb, "also compute NSB entropy per fragment");
        sc->add_option("--threads", sm.threads, "worker threads (default LEXDIV_THREADS or all)");
        sc->callback([&] {
            log_config("sample", json{{"corpus", sm.corpus},
                                      {"step", sm.plan.step},
                                      {"reps", sm.plan.replicates},
                                      {"seed", sm.plan.seed},
                                      {"l_min", sm.plan.l_min},
                                      {"l_max", sm.plan.l_max},
                                      {"nsb", sm.nsb},
                                      {"threads", sm.threads}});
            const auto corpus =
                lexdiv::read_corpus(ids_path(sm.corpus), vocab_path(sm.corpus));
            const auto series =
                lexdiv::sample_series(corpus, sm.plan, {.nsb = sm.nsb}, sm.threads);
            lexdiv::write_series_tsv(series, sm.out);
        });
    }

    // ---- fit-hl / fit-httr ----
    FitArgs fhl, fht;
    {
        auto* sc = app.add_subcommand("fit-hl", "fit H(L) = p1 (beta/2 ln L + ln ln L) + p2");
        add_fit_flags(sc, fhl);
        sc->callback([&] { run_fit(fhl, lexdiv::RelationKind::H_of_L); });
    }
    {
        auto* sc = app.add_subcommand(
            "fit-httr", "fit H(TTR) = p3 [beta/(2(1-beta)) ln TTR^-1 + ln ln TTR^-1] + p4");
        add_fit_flags(sc, fht);
        sc->callback([&] { run_fit(fht, lexdiv::RelationKind::H_of_TTR); });
    }

    // ---- partial-entropy ----
    struct {
        std::string corpus, out;
    } pe;
    {
        auto* sc = app.add_subcommand("partial-entropy",
                                      "cumulative entropy contribution by rank");
        sc->add_option("--corpus", pe.corpus)->required();
        sc->add_option("--out", pe.out, "TSV output path")->required();
        sc->callback([&] {
            log_config("partial-entropy", json{{"corpus", pe.corpus}});
            const auto table =
                lexdiv::frequency_table_from_vocab(lexdiv::read_vocab_tsv(vocab_path(pe.corpus)));
            const auto curve = lexdiv::partial_entropy_curve(table);
            write_tsv(pe.out, "rank\th_p", [&](std::ofstream& o) {
                for (const auto& [r, h] : curve) o << r << '\t' << fmt17(h) << '\n';
            });
        });
    }

    // ---- rh ----
    struct {
        std::string corpus, out;
        std::uint64_t rc = 0;
    } rh;
    {
        auto* sc = app.add_subcommand("rh", "tail entropy share beyond the critical rank");
        sc->add_option("--corpus", rh.corpus)->required();
        sc->add_option("--rc", rh.rc, "critical rank (default: from the Zipf fit crossing)");
        sc->add_option("--out", rh.out, "report JSON path (default stdout)");
        sc->callback([&] {
            log_config("rh", json{{"corpus", rh.corpus}, {"rc", rh.rc}});
            const auto table =
                lexdiv::frequency_table_from_vocab(lexdiv::read_vocab_tsv(vocab_path(rh.corpus)));
            const auto fit = lexdiv::fit_zipf(table);
            const std::uint64_t V = table.entries.size();
            std::uint64_t rc = rh.rc;
            if (rc == 0)
                rc = std::min<std::uint64_t>(
                    V, std::max<std::uint64_t>(2, static_cast<std::uint64_t>(
                                                      std::llround(fit.r_c))));
            json out = zipf_fit_json(fit);
            out["r_c_used"] = rc;
            out["r_h_empirical"] = lexdiv::r_h_empirical(table, rc);
            out["r_h_theoretical"] =
                lexdiv::r_h_theoretical(fit.a1, fit.a2, rc, V, table.total_tokens);
            write_json_report(out, rh.out);
        });
    }

    // ---- collapse ----
    struct {
        std::string series, out;
    } cl;
    {
        auto* sc = app.add_subcommand("collapse", "deviation from H_max vs TTR");
        sc->add_option("--series", cl.series, "series TSV from `sample`")->required();
        sc->add_option("--out", cl.out, "TSV output path")->required();
        sc->callback([&] {
            log_config("collapse", json{{"series", cl.series}});
            const auto pts = lexdiv::collapse_h_max(lexdiv::read_series_tsv(cl.series));
            write_tsv(cl.out, "ttr\th_minus_hmax", [&](std::ofstream& o) {
                for (const auto& [t, dh] : pts) o << fmt17(t) << '\t' << fmt17(dh) << '\n';
            });
        });
    }

    // ---- synth ----
    struct {
        std::string kind = "zipf", out;
        lexdiv::GeneratorSpec spec;
        unsigned threads = 1;
    } sy;
    {
        auto* sc = app.add_subcommand("synth", "generate a synthetic Zipfian corpus");
        sc->add_option("--kind", sy.kind, "zipf | piecewise_zipf")
            ->check(CLI::IsMember({"zipf", "piecewise_zipf"}));
        sc->add_option("--v", sy.spec.V, "vocabulary size")->required();
        sc->add_option("--a", sy.spec.a, "exponent (zipf)");
        sc->add_option("--a1", sy.spec.a1, "head exponent (piecewise)");
        sc->add_option("--a2", sy.spec.a2, "tail exponent (piecewise)");
        sc->add_option("--rc", sy.spec.r_c, "regime boundary rank (piecewise)");
        sc->add_option("--l", sy.spec.L, "tokens to draw")->required();
        sc->add_option("--seed", sy.spec.seed, "RNG seed");
        sc->add_option("--out", sy.out, "output corpus base path")->required();
        sc->add_option("--threads", sy.threads, "generator threads");
        sc->callback([&] {
            log_config("synth", json{{"kind", sy.kind},
                                     {"v", sy.spec.V},
                                     {"a", sy.spec.a},
                                     {"a1", sy.spec.a1},
                                     {"a2", sy.spec.a2},
                                     {"rc", sy.spec.r_c},
                                     {"l", sy.spec.L},
                                     {"seed", sy.spec.seed},
                                     {"threads", sy.threads}});
            sy.spec.kind = sy.kind == "zipf" ? lexdiv::DistKind::zipf
                                             : lexdiv::DistKind::piecewise_zipf;
            const auto corpus = lexdiv::gen_corpus(sy.spec, sy.threads);
            lexdiv::write_corpus(corpus, ids_path(sy.out), vocab_path(sy.out));
            json out{{"total_tokens", corpus.total_tokens},
                     {"types_observed", corpus.observed_types()},
                     {"true_entropy", lexdiv::true_entropy(sy.spec)},
                     {"output", sy.out}};
            std::cout << out.dump() << "\n";
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) {
            json err{{"error", {{"kind", "usage"}, {"message", e.what()}}}};
            std::cerr << err.dump() << "\n";
        }
        return app.exit(e);
    } catch (const lexdiv::Error& e) {
        json err{{"error", {{"kind", e.kind}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json err{{"error", {{"kind", "internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
