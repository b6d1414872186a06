#include "cli.hpp"

#include <pfacap/fixtures.hpp>
#include <pfacap/pfacap.hpp>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef PFACAP_VERSION
#define PFACAP_VERSION "dev"
#endif

namespace pfacap::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string real(double v) {
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    std::ostringstream s;
    for (unsigned i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return s.str();
}

std::string read_file(const fs::path& p) {
    std::ifstream in{p, std::ios::binary};
    if (!in) throw Error("cannot open '" + p.string() + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
    std::ofstream out{p, std::ios::binary};
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << bytes;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& text, const char* what) {
    std::vector<T> out;
    for (const auto& tok : split_list(text)) {
        try {
            std::size_t used = 0;
            if constexpr (std::is_floating_point_v<T>) out.push_back(std::stod(tok, &used));
            else out.push_back(static_cast<T>(std::stoull(tok, &used)));
            if (used != tok.size()) throw std::invalid_argument{tok};
        } catch (const std::exception&) {
            throw Error(std::string{"bad "} + what + " entry '" + tok + "'");
        }
    }
    if (out.empty()) throw Error(std::string{"empty "} + what);
    return out;
}

/// Everything one command produces. The report goes to stdout; with --out
/// the report, each CSV and a manifest are written to the directory.
struct Session {
    std::string command;
    std::ostringstream report;
    std::vector<std::pair<std::string, std::string>> csv;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
    std::optional<std::uint64_t> seed;

    void add_input(const std::string& path) { inputs.emplace_back(path, sha256_hex(read_file(path))); }
};

Pfa resolve_pfa(const std::string& spec, Session& s) {
    if (fs::exists(spec)) {
        s.add_input(spec);
        return load_pfa(spec);
    }
    if (auto p = fixtures::find(spec)) return *p;
    throw Error("'" + spec + "' is neither a file nor a built-in fixture");
}

Rational rat(const std::string& text) { return parse_rational(text); }

void emit_pfa(Session& s, const Pfa& p, const std::string& header = {}) {
    if (!header.empty()) s.report << "# " << header << '\n';
    write_pfa(s.report, p);
}

// ---- commands ----------------------------------------------------------

struct PfaOpts {
    std::string pfa, word, threshold;
    std::size_t max_len = 8;
};

void cmd_pfa_validate(Session& s, const PfaOpts& o) {
    const Pfa p = resolve_pfa(o.pfa, s);
    const auto fr = detect_freeze_reset(p);
    s.report << "valid\nstates " << p.num_states() << "\nsymbols " << p.num_symbols() << "\nfreezable "
             << (fr.freeze ? "yes" : "no") << "\nresettable " << (fr.reset ? "yes" : "no") << '\n';
}

void cmd_pfa_value(Session& s, const PfaOpts& o) {
    const Pfa p = resolve_pfa(o.pfa, s);
    s.report << to_string(value(p, parse_word(p.alphabet, o.word))) << '\n';
}

void cmd_pfa_search(Session& s, const PfaOpts& o) {
    const Pfa p = resolve_pfa(o.pfa, s);
    if (!o.threshold.empty()) {
        const auto found = emptiness_semidecide(p, rat(o.threshold), o.max_len);
        if (found)
            s.report << "found " << format_word(*found) << " value " << to_string(value(p, *found)) << '\n';
        else
            s.report << "none up to length " << o.max_len << '\n';
        return;
    }
    const auto res = brute_force_value(p, o.max_len);
    s.report << "best_value " << to_string(res.best_value) << "\nbest_word " << format_word(res.best_word)
             << "\nwords_examined " << res.words_examined << '\n';
    std::ostringstream csv;
    csv << "length,best_value,word\n";
    for (std::size_t l = 0; l < res.best_by_length.size(); ++l) {
        const auto& sw = res.best_by_length[l];
        csv << sw.symbols.size() << ',' << to_string(sw.value) << ',' << format_word(p.decode(sw.symbols)) << '\n';
    }
    s.csv.emplace_back("search", csv.str());
}

void cmd_pfa_show(Session& s, const PfaOpts& o) { emit_pfa(s, resolve_pfa(o.pfa, s)); }

struct GadgetOpts {
    std::string x = "3/4", y = "1/2", pfa, p, lambda = "1";
    bool lift = false;
};

void cmd_gadget(Session& s, const std::string& kind, const GadgetOpts& o) {
    Pfa out;
    if (kind == "dxy") {
        out = build_D_xy({rat(o.x), rat(o.y)});
    } else if (kind == "day") {
        out = build_D_Ay(resolve_pfa(o.pfa, s), rat(o.y));
    } else if (kind == "bp" || kind == "cp") {
        if (o.p.empty()) throw Error("--p is required");
        const Pfa inner = resolve_pfa(o.pfa, s);
        out = kind == "bp" ? build_B_p(inner, rat(o.p)) : build_C_p(inner, rat(o.p));
    } else {
        const Pfa inner = resolve_pfa(o.pfa, s);
        out = build_family_member(inner, {rat(o.lambda)});
        emit_pfa(s, out,
                 std::to_string(out.num_states()) + " states (target " + std::to_string(kFamilyTargetStates) +
                     " for a 27-state automaton), " + std::to_string(out.num_symbols()) + " symbols, " +
                     std::to_string(2 * out.num_symbols()) + " channel inputs");
        return;
    }
    if (o.lift) out = gamma(out);
    emit_pfa(s, out);
}

struct WitnessOpts {
    std::string x = "3/4", eps = "1/10", y = "1/2", inner, inner_word;
    std::size_t k = 64;
    bool exact = false;
};

void cmd_witness(Session& s, const WitnessOpts& o) {
    WitnessParams params{rat(o.x), rat(o.eps), o.k};
    WitnessMode mode = PlainMode{};
    if (!o.inner.empty()) {
        Pfa inner = resolve_pfa(o.inner, s);
        Word w = parse_word(inner.alphabet, o.inner_word);
        mode = LiftedMode{std::move(inner), std::move(w)};
    }
    const auto rep = synthesize_word(params, mode, rat(o.y));
    auto num = [&](const Rational& r) { return o.exact ? to_string(r) : real(to_double(r)); };
    s.report << "x " << to_string(rep.x) << "\neps " << to_string(rep.eps) << "\ny " << to_string(rep.y) << "\nk "
             << o.k << "\nlengths";
    for (auto n : rep.lengths) s.report << ' ' << n;
    s.report << "\nword_length " << rep.word.size() << "\nword " << format_word(rep.word) << "\ntail_blocks "
             << rep.tail_blocks << "\np_q1_q3 " << num(rep.p_q1_q3) << "\np_q4_q6 " << num(rep.p_q4_q6)
             << "\nvalue " << num(rep.value) << "\nrequirement_q4_q6_at_most_eps "
             << (rep.requirement1_met ? "met" : "not met") << "\nrequirement_q1_q3_at_least_1_minus_eps "
             << (rep.requirement2_met ? "met" : "not met") << '\n';
    std::ostringstream csv;
    csv << "k,p_q1_q3,p_q4_q6,value\n";
    for (const auto& r : rep.rows)
        csv << r.k << ',' << real(to_double(r.p_q1_q3)) << ',' << real(to_double(r.p_q4_q6)) << ','
            << real(to_double(r.value)) << '\n';
    s.csv.emplace_back("witness", csv.str());
}

struct ChannelOpts {
    std::string pfa, channel, input;
    bool lift = false;
    std::uint64_t seed = 1;
    std::size_t count = 1;
};

Fsmc resolve_channel(const ChannelOpts& o, Session& s) {
    if (!o.channel.empty()) {
        s.add_input(o.channel);
        return load_fsmc(o.channel);
    }
    if (o.pfa.empty()) throw Error("one of --pfa or --channel is required");
    Pfa a = resolve_pfa(o.pfa, s);
    return build_V(o.lift ? gamma(a) : a);
}

void cmd_channel_build(Session& s, const ChannelOpts& o) { write_fsmc(s.report, resolve_channel(o, s)); }

void cmd_channel_sample(Session& s, const ChannelOpts& o) {
    const Fsmc ch = resolve_channel(o, s);
    std::vector<std::size_t> input;
    for (const auto& tok : split_list(o.input)) input.push_back(ch.input_index(tok));
    s.seed = o.seed;
    Rng rng{o.seed};
    const ChannelSampler sampler{ch};
    for (std::size_t i = 0; i < o.count; ++i) {
        const auto ys = sampler.run(input, rng);
        for (std::size_t j = 0; j < ys.size(); ++j) s.report << (j ? " " : "") << ch.outputs[ys[j]];
        s.report << '\n';
    }
}

struct CapacityOpts {
    std::string pfa, channel, delta = "1/10", budget, tol = "1e-9", bsc;
    std::vector<std::string> words;
    std::size_t max_iters = 100000, n = 4, trials = 100, horizon = 0;
    std::uint64_t seed = 1;
    bool lift = false;
    // stability
    std::string val, n_list = "20,24", word = "aa", eta = "0.5,1,2,3";
    std::size_t stages = 1, samples = 10000;
};

void cmd_bracket(Session& s, const CapacityOpts& o) {
    const Pfa a = resolve_pfa(o.pfa, s);
    std::vector<Word> extra;
    ControlSchedule tmp;
    const Pfa chan = bracket_detail::channel_automaton(a, tmp);
    for (const auto& w : o.words) extra.push_back(parse_word(chan.alphabet, w));
    const auto br = capacity_bracket(a, rat(o.delta), parse_budget(o.budget), extra);
    s.report << "lower " << real(br.lower) << "\nlower_word " << format_word(br.word) << "\nlower_word_value "
             << to_string(br.word_value) << "\nlower_m " << br.m << "\nlower_n " << br.n << "\ndelta "
             << to_string(br.delta) << "\nupper " << real(br.upper) << "\nupper_kind " << br.upper_label
             << "\nupper_word " << format_word(br.upper_word) << "\nupper_value " << to_string(br.upper_value)
             << "\nhorizon " << br.horizon << "\ngap " << real(br.gap) << "\nbudget_exceeded "
             << (br.budget_exceeded ? "yes" : "no") << '\n';
    std::ostringstream csv;
    csv << "block,lower,upper\n";
    for (const auto& pt : br.curve) csv << pt.block << ',' << real(pt.lower) << ',' << real(pt.upper) << '\n';
    s.csv.emplace_back("bracket", csv.str());
}

void cmd_ba(Session& s, const CapacityOpts& o) {
    DiscreteChannel ch;
    if (!o.bsc.empty()) {
        ch = DiscreteChannel::bsc(to_double(rat(o.bsc)));
    } else {
        if (o.channel.empty()) throw Error("one of --channel or --bsc is required");
        s.add_input(o.channel);
        ch = load_channel(o.channel);
    }
    const double tol = to_double(rat(o.tol));
    const auto res = blahut_arimoto(ch, tol, o.max_iters);
    s.report << "capacity " << real(res.capacity) << "\nupper " << real(res.upper) << "\ngap " << real(res.gap)
             << "\niterations " << res.iterations << "\nconverged " << (res.converged ? "yes" : "no") << "\ninput";
    for (double p : res.input) s.report << ' ' << real(p);
    s.report << '\n';
    if (!res.converged) throw Error("iteration limit reached with gap " + real(res.gap));
}

void cmd_converse(Session& s, const CapacityOpts& o) {
    ChannelOpts co;
    co.pfa = o.pfa;
    co.channel = o.channel;
    co.lift = o.lift;
    const Fsmc ch = resolve_channel(co, s);
    s.seed = o.seed;
    const auto rep = converse_check(ch, o.n, o.trials, o.seed, o.horizon);
    s.report << "n " << rep.n << "\nhorizon " << rep.horizon << "\nval_horizon " << to_string(rep.val_horizon)
             << "\ntrials " << rep.trials << "\nviolations " << rep.violations << "\nmin_entropy_slack "
             << real(rep.min_entropy_slack) << "\nmax_rate " << real(rep.max_rate) << '\n';
    if (!rep.diagnosis.empty()) s.report << "diagnosis " << rep.diagnosis << '\n';
    std::ostringstream csv;
    csv << "trial,conditional_entropy,entropy_bound,rate,violated\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        csv << i << ',' << real(r.conditional_entropy) << ',' << real(r.entropy_bound) << ',' << real(r.rate) << ','
            << (r.violated ? 1 : 0) << '\n';
    }
    s.csv.emplace_back("converse", csv.str());
    if (rep.violations > 0) throw Error("converse violated in " + std::to_string(rep.violations) + " trials: " + rep.diagnosis);
}

void cmd_stability_schedule(Session& s, const CapacityOpts& o) {
    if (o.val.empty()) throw Error("--val is required");
    const auto sched = stability_schedule(to_double(rat(o.val)), to_double(rat(o.delta)),
                                          parse_numbers<std::size_t>(o.n_list, "n-list"));
    const auto ns = parse_numbers<std::size_t>(o.n_list, "n-list");
    std::ostringstream csv;
    csv << "t,n_t,m_formula,m_t,n_next_squared\n";
    for (const auto& st : sched.stages)
        csv << st.t << ',' << st.n << ',' << st.m_formula << ',' << st.m << ',' << ns[st.t] * ns[st.t] << '\n';
    s.report << "val " << real(sched.val) << "\ndelta " << real(sched.delta) << "\nstages " << sched.stages.size()
             << '\n';
    s.csv.emplace_back("schedule", csv.str());
}

void cmd_stability_demo(Session& s, const CapacityOpts& o) {
    const Pfa a = resolve_pfa(o.pfa.empty() ? "toy3" : o.pfa, s);
    ControlSchedule tmp;
    const Pfa chan = bracket_detail::channel_automaton(a, tmp);
    const Word w = parse_word(chan.alphabet, o.word);
    const double val = o.val.empty() ? to_double(value(chan, w)) : to_double(rat(o.val));
    const auto sched = stability_schedule(val, to_double(rat(o.delta)), parse_numbers<std::size_t>(o.n_list, "n-list"));
    s.seed = o.seed;
    const auto rep = spectrum_concentration_demo(build_V(chan), w, sched, o.stages, o.samples, o.seed,
                                                 parse_numbers<double>(o.eta, "eta"));
    s.report << "stages " << rep.stages << "\nuses " << rep.uses << "\nblocks " << rep.blocks << "\nval "
             << real(rep.val) << "\ndelta " << real(rep.delta) << "\nc_n " << real(rep.c_n) << "\nmean_density "
             << real(rep.mean_density) << "\nsamples " << rep.samples << "\nseed " << rep.seed << '\n';
    for (std::size_t t = 0; t < rep.stages; ++t)
        s.report << "m_" << t + 1 << ' ' << sched.stages[t].m << "\nn_" << t + 1 << ' ' << sched.stages[t].n << '\n';
    std::ostringstream csv;
    csv << "eta,empirical,analytic,empirical_val,slack,within\n";
    bool ok = true;
    for (const auto& r : rep.rows) {
        csv << real(r.eta) << ',' << real(r.empirical) << ',' << real(r.analytic) << ',' << real(r.empirical_val)
            << ',' << real(r.slack) << ',' << (r.within ? 1 : 0) << '\n';
        ok = ok && r.within;
    }
    s.report << "all_within " << (ok ? "yes" : "no") << '\n';
    s.csv.emplace_back("stability", csv.str());
}

void cmd_sigma_encode(Session& s, const std::vector<std::string>& values) {
    std::vector<Rational> rs;
    for (const auto& v : values) rs.push_back(rat(v));
    s.report << sigma_encode(rs).value.str() << '\n';
}

void cmd_sigma_decode(Session& s, const std::string& code_text, std::size_t arity) {
    if (code_text.empty() || code_text.find_first_not_of("0123456789") != std::string::npos)
        throw Error("'" + code_text + "' is not a non-negative integer");
    const BigInt code = decimal_integer(code_text);
    if (arity == 0) {
        // Smallest arity whose first 2N primes all divide the code.
        for (std::size_t n = 1;; ++n) {
            const auto primes = first_primes(2 * n);
            BigInt prod{1};
            for (auto p : primes) prod *= p;
            if (prod > code) throw Error("sigma: " + code_text + " is not a valid code");
            try {
                sigma_decode({code, n});
                arity = n;
                break;
            } catch (const Error&) {
            }
        }
    }
    const auto values = sigma_decode({code, arity});
    for (std::size_t i = 0; i < values.size(); ++i) s.report << (i ? " " : "") << to_string(values[i]);
    s.report << '\n';
}

// ---- manifests ---------------------------------------------------------

void write_outputs(const Session& s, const fs::path& dir, const std::vector<std::string>& args) {
    fs::create_directories(dir);
    json outputs = json::array();
    auto put = [&](const std::string& name, const std::string& bytes) {
        write_file(dir / name, bytes);
        outputs.push_back({{"file", name}, {"sha256", sha256_hex(bytes)}});
    };
    put("report.txt", s.report.str());
    for (const auto& [name, bytes] : s.csv) put(name + ".csv", bytes);
    json inputs = json::array();
    for (const auto& [path, digest] : s.inputs) inputs.push_back({{"path", path}, {"sha256", digest}});
    json m{{"tool", "pfacap"},
           {"version", PFACAP_VERSION},
           {"command", s.command},
           {"args", args},
           {"cwd", fs::current_path().string()},
           {"seed", s.seed ? json(*s.seed) : json(nullptr)},
           {"inputs", inputs},
           {"outputs", outputs}};
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_replay(const std::string& manifest_path, std::string out_dir, std::ostream& out, std::ostream& err) {
    const json m = json::parse(read_file(manifest_path));
    const fs::path cwd = m.at("cwd").get<std::string>();
    auto args = m.at("args").get<std::vector<std::string>>();
    if (out_dir.empty()) out_dir = (fs::absolute(manifest_path).parent_path() / "replay").string();
    out_dir = fs::absolute(out_dir).string();
    bool replaced = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out" && i + 1 < args.size()) {
            args[i + 1] = out_dir;
            replaced = true;
        } else if (args[i].rfind("--out=", 0) == 0) {
            args[i] = "--out=" + out_dir;
            replaced = true;
        }
    }
    if (!replaced) throw Error("manifest arguments carry no --out");

    const fs::path here = fs::current_path();
    struct Restore {
        fs::path p;
        ~Restore() { fs::current_path(p); }
    } restore{here};
    fs::current_path(cwd);
    for (const auto& in : m.at("inputs")) {
        const auto path = in.at("path").get<std::string>();
        if (sha256_hex(read_file(path)) != in.at("sha256").get<std::string>())
            throw Error("input '" + path + "' changed since the manifest was written");
    }
    std::ostringstream sink;
    const int code = dispatch(args, sink, err);
    if (code != kExitOk) return code;
    std::size_t files = 0;
    for (const auto& o : m.at("outputs")) {
        const auto name = o.at("file").get<std::string>();
        if (sha256_hex(read_file(fs::path{out_dir} / name)) != o.at("sha256").get<std::string>())
            throw Error("replay output '" + name + "' differs from the manifest");
        ++files;
    }
    out << "replay identical: " << files << " files in " << out_dir << '\n';
    return kExitOk;
}

std::string one_line(std::string msg) {
    for (auto& c : msg)
        if (c == '\n' || c == '\r') c = ' ';
    return msg;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probabilistic automata, channel lifts and capacity bounds", "pfacap"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_dir;
    unsigned threads = 0;
    app.add_option("--out", out_dir, "Write report, CSV files and a manifest to this directory");
    app.add_option("--threads", threads, "Worker threads (default: PFACAP_THREADS or 1)")->check(CLI::PositiveNumber);
    app.set_version_flag("--version", PFACAP_VERSION);

    // pfa
    PfaOpts po;
    auto* pfa = app.add_subcommand("pfa", "Automaton utilities")->require_subcommand(1);
    auto add_pfa = [&](CLI::App* c) { c->add_option("--pfa", po.pfa, "Automaton file or fixture name")->required(); };
    auto* pfa_validate = pfa->add_subcommand("validate", "Check an automaton file");
    add_pfa(pfa_validate);
    auto* pfa_value = pfa->add_subcommand("value", "Acceptance probability of a word");
    add_pfa(pfa_value);
    pfa_value->add_option("--word", po.word, "Word, e.g. baa or 'a id b'; eps for the empty word")->required();
    auto* pfa_search = pfa->add_subcommand("search", "Exhaustive search for the best word");
    add_pfa(pfa_search);
    pfa_search->add_option("--max-len", po.max_len, "Longest word examined");
    pfa_search->add_option("--threshold", po.threshold, "Stop at the first word with value above this");
    auto* pfa_show = pfa->add_subcommand("show", "Print an automaton in the text format");
    add_pfa(pfa_show);

    // gadget
    GadgetOpts go;
    auto* gadget = app.add_subcommand("gadget", "Gadget constructions")->require_subcommand(1);
    auto* g_dxy = gadget->add_subcommand("dxy", "Two-branch gadget with coin x");
    g_dxy->add_option("--x", go.x)->required();
    g_dxy->add_option("--y", go.y);
    g_dxy->add_flag("--lift", go.lift, "Add freeze and reset symbols");
    auto* g_day = gadget->add_subcommand("day", "Two-branch gadget driven by an automaton");
    g_day->add_option("--pfa", go.pfa)->required();
    g_day->add_option("--y", go.y);
    g_day->add_flag("--lift", go.lift);
    auto* g_bp = gadget->add_subcommand("bp", "Scaled automaton: value p*val");
    g_bp->add_option("--pfa", go.pfa)->required();
    g_bp->add_option("--p", go.p)->required();
    g_bp->add_flag("--lift", go.lift);
    auto* g_cp = gadget->add_subcommand("cp", "Shifted automaton: value p*val + 1 - p");
    g_cp->add_option("--pfa", go.pfa)->required();
    g_cp->add_option("--p", go.p)->required();
    g_cp->add_flag("--lift", go.lift);
    auto* g_family = gadget->add_subcommand("family", "Lifted family member for threshold lambda");
    g_family->add_option("--pfa", go.pfa)->required();
    g_family->add_option("--lambda", go.lambda);

    // witness
    WitnessOpts wo;
    auto* witness = app.add_subcommand("witness", "Synthesize near-optimal gadget words");
    witness->add_option("--x", wo.x);
    witness->add_option("--eps", wo.eps);
    witness->add_option("--k", wo.k)->check(CLI::Range(2, 100000));
    witness->add_option("--y", wo.y);
    witness->add_option("--inner", wo.inner, "Embedded automaton (switches to the driven gadget)");
    witness->add_option("--inner-word", wo.inner_word, "Word of the embedded automaton used as the coin");
    witness->add_flag("--exact", wo.exact, "Print probabilities as exact fractions");

    // channel
    ChannelOpts co;
    auto* channel = app.add_subcommand("channel", "Finite-state channels")->require_subcommand(1);
    auto* c_build = channel->add_subcommand("build", "Lift an automaton to its channel");
    c_build->add_option("--pfa", co.pfa)->required();
    c_build->add_flag("--lift", co.lift, "Add freeze and reset symbols first");
    auto* c_sample = channel->add_subcommand("sample", "Sample output sequences");
    c_sample->add_option("--pfa", co.pfa);
    c_sample->add_option("--channel", co.channel);
    c_sample->add_flag("--lift", co.lift);
    c_sample->add_option("--input", co.input, "Input symbols, e.g. '0:a 1:b'")->required();
    c_sample->add_option("--seed", co.seed);
    c_sample->add_option("--count", co.count);

    // capacity
    CapacityOpts ko;
    auto* cap = app.add_subcommand("capacity", "Capacity bounds")->require_subcommand(1);
    auto* k_bracket = cap->add_subcommand("bracket", "Lower and upper bound on the capacity of the lift");
    k_bracket->add_option("--pfa", ko.pfa)->required();
    k_bracket->add_option("--delta", ko.delta);
    k_bracket->add_option("--budget", ko.budget, "e.g. horizon=8,block=12,table=16384,words=4194304");
    k_bracket->add_option("--word", ko.words, "Extra candidate word (repeatable)");
    auto* k_ba = cap->add_subcommand("ba", "Blahut-Arimoto on a memoryless channel");
    k_ba->add_option("--channel", ko.channel);
    k_ba->add_option("--bsc", ko.bsc, "Binary symmetric channel with this crossover");
    k_ba->add_option("--tol", ko.tol);
    k_ba->add_option("--max-iters", ko.max_iters);
    auto* k_conv = cap->add_subcommand("converse", "Exact converse check on random product inputs");
    k_conv->add_option("--pfa", ko.pfa);
    k_conv->add_option("--channel", ko.channel);
    k_conv->add_flag("--lift", ko.lift);
    k_conv->add_option("--n", ko.n)->check(CLI::Range(1, 6));
    k_conv->add_option("--trials", ko.trials);
    k_conv->add_option("--seed", ko.seed);
    k_conv->add_option("--horizon", ko.horizon);
    auto* k_stab = cap->add_subcommand("stability", "Staged-source schedule and concentration demo")->require_subcommand(1);
    auto* k_sched = k_stab->add_subcommand("schedule", "Copy counts m_t");
    k_sched->add_option("--val", ko.val)->required();
    k_sched->add_option("--delta", ko.delta);
    k_sched->add_option("--n-list", ko.n_list);
    auto* k_demo = k_stab->add_subcommand("demo", "Sampled information density tails");
    k_demo->add_option("--pfa", ko.pfa);
    k_demo->add_option("--word", ko.word);
    k_demo->add_option("--val", ko.val);
    k_demo->add_option("--delta", ko.delta);
    k_demo->add_option("--n-list", ko.n_list);
    k_demo->add_option("--stages", ko.stages)->check(CLI::Range(1, 2));
    k_demo->add_option("--samples", ko.samples);
    k_demo->add_option("--seed", ko.seed);
    k_demo->add_option("--eta", ko.eta);

    // sigma
    auto* sigma = app.add_subcommand("sigma", "Prime-power encoding of rational tuples")->require_subcommand(1);
    std::vector<std::string> sigma_values;
    std::string sigma_code;
    std::size_t sigma_arity = 0;
    auto* s_enc = sigma->add_subcommand("encode", "Encode positive rationals");
    s_enc->add_option("values", sigma_values)->required();
    auto* s_dec = sigma->add_subcommand("decode", "Decode a code");
    s_dec->add_option("code", sigma_code)->required();
    s_dec->add_option("--arity", sigma_arity, "Tuple length (inferred when omitted)");

    // replay
    std::string manifest;
    auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare outputs");
    replay->add_option("manifest", manifest)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << one_line(e.what()) << '\n';
        return kExitUsage;
    }
    if (threads > 0) thread_override() = threads;

    if (*replay) return cmd_replay(manifest, out_dir, out, err);

    Session s;
    auto leaf = [&](CLI::App* parent, CLI::App* child) {
        s.command = parent->get_name() + " " + child->get_name();
        return true;
    };
    if (*pfa_validate && leaf(pfa, pfa_validate)) cmd_pfa_validate(s, po);
    else if (*pfa_value && leaf(pfa, pfa_value)) cmd_pfa_value(s, po);
    else if (*pfa_search && leaf(pfa, pfa_search)) cmd_pfa_search(s, po);
    else if (*pfa_show && leaf(pfa, pfa_show)) cmd_pfa_show(s, po);
    else if (*g_dxy && leaf(gadget, g_dxy)) cmd_gadget(s, "dxy", go);
    else if (*g_day && leaf(gadget, g_day)) cmd_gadget(s, "day", go);
    else if (*g_bp && leaf(gadget, g_bp)) cmd_gadget(s, "bp", go);
    else if (*g_cp && leaf(gadget, g_cp)) cmd_gadget(s, "cp", go);
    else if (*g_family && leaf(gadget, g_family)) cmd_gadget(s, "family", go);
    else if (*witness) {
        s.command = "witness";
        cmd_witness(s, wo);
    } else if (*c_build && leaf(channel, c_build)) cmd_channel_build(s, co);
    else if (*c_sample && leaf(channel, c_sample)) cmd_channel_sample(s, co);
    else if (*k_bracket && leaf(cap, k_bracket)) cmd_bracket(s, ko);
    else if (*k_ba && leaf(cap, k_ba)) cmd_ba(s, ko);
    else if (*k_conv && leaf(cap, k_conv)) cmd_converse(s, ko);
    else if (*k_sched && leaf(cap, k_sched)) {
        s.command = "capacity stability schedule";
        cmd_stability_schedule(s, ko);
    } else if (*k_demo && leaf(cap, k_demo)) {
        s.command = "capacity stability demo";
        cmd_stability_demo(s, ko);
    } else if (*s_enc && leaf(sigma, s_enc)) cmd_sigma_encode(s, sigma_values);
    else if (*s_dec && leaf(sigma, s_dec)) cmd_sigma_decode(s, sigma_code, sigma_arity);
    else {
        err << "usage error: no command given\n";
        return kExitUsage;
    }

    out << s.report.str();
    if (!out_dir.empty()) {
        write_outputs(s, out_dir, args);
    } else {
        for (const auto& [name, bytes] : s.csv) out << "\n# " << name << ".csv\n" << bytes;
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const unsigned saved = thread_override();
    try {
        const int code = dispatch(args, out, err);
        thread_override() = saved;
        return code;
    } catch (const std::exception& e) {
        thread_override() = saved;
        err << "error: " << one_line(e.what()) << '\n';
        return kExitDomain;
    }
}

}  // namespace pfacap::cli
