// spamsim: mail-network simulator comparing spam-filter placement.
//
// Subcommands: gen-corpus, train, run, compare, check.
// Exit codes: 0 success/pass, 1 message filtered, 2 usage/config error,
// 3 scenario-ordering assertion failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spamsim/spamsim.hpp"

namespace {

using namespace spamsim;

constexpr int kExitFiltered = 1;
constexpr int kExitUsage = 2;
constexpr int kExitOrdering = 3;

Config load_base_config(const std::string& flag_path) {
    Config cfg;
    std::string path = flag_path;
    if (path.empty()) {
        if (const char* env = std::getenv("SPAMSIM_CONFIG")) path = env;
    }
    if (!path.empty()) cfg.load_file(path);
    return cfg;
}

// lists/rules/stats named in the config become the shared context template
void load_context_files(Config& cfg) {
    if (!cfg.whitelist_path.empty()) cfg.context.whitelist = load_list(cfg.whitelist_path);
    if (!cfg.blacklist_path.empty()) cfg.context.blacklist = load_list(cfg.blacklist_path);
    if (!cfg.rules_path.empty()) cfg.context.rules = load_rules(cfg.rules_path);
    if (!cfg.stats_path.empty()) cfg.context.stats = load_stats(cfg.stats_path);
}

World world_for(const Config& cfg, const std::vector<CorpusRecord>& corpus) {
    if (cfg.world_path.empty()) return default_world(corpus);
    std::ifstream in(cfg.world_path);
    if (!in) throw ConfigError("cannot read world file " + cfg.world_path);
    return parse_world(in);
}

// without an explicit stats file the harness trains on the corpus labels
void ensure_stats(Config& cfg, const std::vector<CorpusRecord>& corpus) {
    if (cfg.context.stats.tokens.empty() && cfg.context.stats.spam_msgs == 0 &&
        cfg.context.stats.ham_msgs == 0 && !corpus.empty())
        cfg.context.stats = bayes_train(training_view(corpus));
}

void append_csv_rows(const std::string& path, const std::vector<std::string>& rows,
                     bool truncate) {
    bool need_header = truncate || !std::filesystem::exists(path) ||
                       std::filesystem::file_size(path) == 0;
    std::ofstream out(path, truncate ? std::ios::binary : (std::ios::binary | std::ios::app));
    if (!out) throw IoError("cannot write " + path);
    if (need_header) out << report_csv_header() << '\n';
    for (const auto& r : rows) out << r << '\n';
}

int cmd_gen_corpus(const GeneratorParams& params, const std::string& out_path) {
    auto corpus = generate_corpus(params);
    save_corpus(corpus, out_path);
    std::set<ContentDigest> digests, spam_digests;
    for (const auto& rec : corpus) {
        auto d = content_digest(rec.msg);
        digests.insert(d);
        if (rec.label == Label::Spam) spam_digests.insert(d);
    }
    std::cout << "wrote " << corpus.size() << " records to " << out_path << " ("
              << digests.size() << " distinct digests, " << spam_digests.size()
              << " distinct spam digests)\n";
    return 0;
}

int cmd_train(Config& cfg, const std::string& corpus_path, const std::string& out_path) {
    auto corpus = load_corpus(corpus_path);
    (void)cfg;
    TokenStats stats = bayes_train(training_view(corpus));
    save_stats(stats, out_path);
    std::cout << "trained on " << corpus.size() << " messages (" << stats.spam_msgs << " spam, "
              << stats.ham_msgs << " ham), " << stats.tokens.size() << " tokens -> " << out_path
              << '\n';
    return 0;
}

int cmd_run(Config& cfg, int scenario_id, std::size_t n_messages) {
    auto corpus = load_corpus(cfg.corpus_path);
    if (corpus.empty()) throw ConfigError("corpus is empty: " + cfg.corpus_path);
    if (n_messages == 0) n_messages = corpus.size();
    load_context_files(cfg);
    ensure_stats(cfg, corpus);
    World world = world_for(cfg, corpus);
    ScenarioSpec spec =
        ScenarioSpec::make(scenario_id, n_messages, cfg.cost_model(), cfg.corpus_path);
    ScenarioResult res = run_scenario(spec, world, corpus, cfg.context);
    const auto& m = res.metrics;
    if (!cfg.output_path.empty())
        append_csv_rows(cfg.output_path, {report_csv_row(spec, m)}, false);
    std::cout << report_csv_header() << '\n' << report_csv_row(spec, m) << '\n';
    std::cout << "scenario " << spec.id << " (" << spec.cost.profile << "): total "
              << format_seconds(m.total) << " s = filter " << format_seconds(m.filter_time)
              << " s + network " << format_seconds(m.network_time) << " s; "
              << m.filter_invocations << " filter executions, " << m.delivered << " delivered, "
              << m.blocked << " blocked\n";
    return 0;
}

int cmd_compare(Config& cfg, const std::vector<std::string>& profiles, std::size_t n_messages,
                const std::string& plot_path, bool assert_ordering) {
    auto corpus = load_corpus(cfg.corpus_path);
    if (corpus.empty()) throw ConfigError("corpus is empty: " + cfg.corpus_path);
    if (n_messages == 0) n_messages = corpus.size();
    load_context_files(cfg);
    ensure_stats(cfg, corpus);
    World world = world_for(cfg, corpus);

    std::vector<std::string> rows;
    std::map<std::string, ComparisonTable> tables;
    bool ok = true;
    for (const auto& profile : profiles) {
        Config per = cfg;
        per.profile = profile;
        std::vector<ScenarioSpec> specs;
        for (int id = 1; id <= 4; ++id)
            specs.push_back(
                ScenarioSpec::make(id, n_messages, per.cost_model(), cfg.corpus_path));
        ComparisonTable table = compare_scenarios(specs, world, corpus, cfg.context);
        for (const auto& spec : specs)
            rows.push_back(report_csv_row(spec, table.by_id.at(spec.id)));
        double ratio = speedup(table.by_id.at(1), table.by_id.at(3));
        std::cout << profile << ": speedup scenario1/scenario3 = ";
        if (std::isinf(ratio))
            std::cout << "inf";
        else
            std::cout << ratio;
        std::cout << (table.ordering_ok ? ", ordering ok" : ", ORDERING VIOLATION: ")
                  << table.violation << '\n';
        ok = ok && table.ordering_ok;
        tables[profile] = std::move(table);
    }
    if (!cfg.output_path.empty()) append_csv_rows(cfg.output_path, rows, true);
    for (const auto& r : rows) std::cout << r << '\n';
    if (!plot_path.empty()) {
        std::ofstream out(plot_path, std::ios::binary);
        if (!out) throw IoError("cannot write " + plot_path);
        out << plot_data(tables);
    }
    if (!ok && assert_ordering) return kExitOrdering;
    return 0;
}

int cmd_check(Config& cfg, const std::string& message_path) {
    auto records = load_corpus(message_path);
    if (records.empty()) throw ConfigError("no message in " + message_path);
    const CorpusRecord& rec = records.front();
    load_context_files(cfg);
    World world = world_for(cfg, {rec});
    // route recipients to B so the default world resolves them
    FilterContext ctx = spamsim::detail::make_context(
        cfg.context, world, world.server("A").client_directory, Mount::SenderSide, false);

    Verdict last = Verdict::pass();
    for (const auto& rcpt : rec.msg.rcpt) {
        EmailAddress effective(rcpt.local(), "b.example");
        std::vector<Stage> trace;
        Verdict v = run_pipeline(rec.msg, effective, rec.msg.submitted_at, ctx, &trace);
        std::cout << rec.msg.id << " -> " << rcpt.render() << '\n';
        for (Stage s : trace) std::cout << "  " << stage_name(s) << '\n';
        std::cout << "  verdict: " << decision_name(v.decision) << " at " << stage_name(v.stage)
                  << " (" << v.reason << ")\n";
        if (v.decision != Decision::Pass) last = v;
    }
    return last.decision == Decision::Pass ? 0 : kExitFiltered;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spam-filter placement simulator"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "config file (default: $SPAMSIM_CONFIG)");

    // gen-corpus
    auto* gen = app.add_subcommand("gen-corpus", "generate a deterministic labeled corpus");
    GeneratorParams gp;
    std::string gen_out = "corpus.jsonl";
    gen->add_option("--count", gp.count, "number of messages");
    gen->add_option("--spam-ratio", gp.spam_ratio, "fraction of spam in [0,1]");
    gen->add_option("--distinct-spam", gp.distinct_spam_bodies, "distinct spam bodies");
    gen->add_option("--seed", gp.seed, "generator seed");
    gen->add_option("--rcpt", gp.rcpt_per_message, "recipients per message");
    gen->add_option("--spam-vocab", gp.spam_vocab, "spam vocabulary size");
    gen->add_option("--ham-vocab", gp.ham_vocab, "ham vocabulary size");
    gen->add_option("--body-min", gp.body_min_words, "minimum body words");
    gen->add_option("--body-max", gp.body_max_words, "maximum body words");
    gen->add_option("--out", gen_out, "output corpus path");

    // train
    auto* train = app.add_subcommand("train", "train token statistics from a labeled corpus");
    std::string train_corpus, train_out = "stats.tsv";
    train->add_option("--corpus", train_corpus, "labeled corpus")->required();
    train->add_option("--out", train_out, "output stats path");

    // run
    auto* run = app.add_subcommand("run", "run one placement scenario");
    int scenario_id = 1;
    std::size_t run_n = 0;
    std::string run_corpus, run_world, run_out, run_profile;
    run->add_option("--scenario", scenario_id, "scenario id 1..4")->required();
    run->add_option("--profile", run_profile, "cost profile");
    run->add_option("--corpus", run_corpus, "corpus path");
    run->add_option("--world", run_world, "world description file");
    run->add_option("--n", run_n, "messages to take from the corpus (default all)");
    run->add_option("--out", run_out, "report CSV to append to");

    // compare
    auto* compare = app.add_subcommand("compare", "run scenarios 1-4 and compare");
    std::string cmp_profiles, cmp_corpus, cmp_world, cmp_out, cmp_plot;
    std::size_t cmp_n = 0;
    bool assert_ordering = false;
    compare->add_option("--profiles", cmp_profiles, "comma-separated cost profiles");
    compare->add_option("--corpus", cmp_corpus, "corpus path");
    compare->add_option("--world", cmp_world, "world description file");
    compare->add_option("--n", cmp_n, "messages to take from the corpus (default all)");
    compare->add_option("--out", cmp_out, "report CSV (rewritten)");
    compare->add_option("--plot", cmp_plot, "gnuplot data file");
    compare->add_flag("--assert-ordering", assert_ordering,
                      "exit 3 if the sender-side ordering does not hold");

    // check
    auto* check = app.add_subcommand("check", "trace one message through the pipeline");
    std::string check_message;
    check->add_option("--message", check_message, "single-record corpus file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg = load_base_config(config_path);

        if (gen->parsed()) return cmd_gen_corpus(gp, gen_out);
        if (train->parsed()) return cmd_train(cfg, train_corpus, train_out);
        if (run->parsed()) {
            if (!run_profile.empty()) cfg.set("profile", run_profile);
            if (!run_corpus.empty()) cfg.corpus_path = run_corpus;
            if (!run_world.empty()) cfg.world_path = run_world;
            if (!run_out.empty()) cfg.output_path = run_out;
            if (cfg.corpus_path.empty()) throw ConfigError("run needs --corpus");
            return cmd_run(cfg, scenario_id, run_n);
        }
        if (compare->parsed()) {
            if (!cmp_corpus.empty()) cfg.corpus_path = cmp_corpus;
            if (!cmp_world.empty()) cfg.world_path = cmp_world;
            if (!cmp_out.empty()) cfg.output_path = cmp_out;
            if (cfg.corpus_path.empty()) throw ConfigError("compare needs --corpus");
            std::vector<std::string> profiles;
            if (cmp_profiles.empty()) {
                profiles.push_back(cfg.profile);
            } else {
                std::string cur;
                for (char c : cmp_profiles + ",") {
                    if (c == ',') {
                        if (!cur.empty()) profiles.push_back(cur);
                        cur.clear();
                    } else {
                        cur += c;
                    }
                }
            }
            return cmd_compare(cfg, profiles, cmp_n, cmp_plot, assert_ordering);
        }
        if (check->parsed()) return cmd_check(cfg, check_message);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
