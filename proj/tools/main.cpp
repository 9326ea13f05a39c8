#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctlab/errors.hpp"
#include "ctlab/parallel.hpp"
#include "ctlab/report.hpp"
#include "ctlab/run_config.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    ctlab::require(in.good(), ctlab::ErrorCode::IoFailure,
                   "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        ctlab::fail(ctlab::ErrorCode::MalformedFile,
                    "config is not valid JSON: " + std::string(e.what()));
    }
}

// Precedence: --threads flag, then the config's "threads", then the
// environment / hardware default.
int settle_threads(int flag_value, int config_value) {
    if (flag_value > 0) return flag_value;
    return ctlab::resolve_thread_count(config_value);
}

void emit_success(const std::string& command, const std::string& out_dir,
                  const std::map<std::string, std::string>& files) {
    json ok;
    ok["ok"] = true;
    ok["command"] = command;
    ok["out_dir"] = out_dir;
    json names = json::array();
    for (const auto& [rel, bytes] : files) {
        (void)bytes;
        names.push_back(rel);
    }
    ok["files"] = names;
    std::fputs(ctlab::dump_report(ok).c_str(), stdout);
}

void write_files(const std::string& out_dir,
                 const std::map<std::string, std::string>& files) {
    for (const auto& [rel, bytes] : files)
        ctlab::atomic_write_file(out_dir + "/" + rel, bytes);
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
};

void attach_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run configuration")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory (created if missing)");
    cmd->add_option("--threads", args.threads, "worker thread count")
        ->check(CLI::Range(1, 4096));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cover-time laboratory for reversible walks on weighted graphs"};
    app.require_subcommand(1);

    CommonArgs gen_args, analyze_args, classify_args, catalog_args;
    CLI::App* gen = app.add_subcommand("gen", "draw graphs from a family");
    attach_common(gen, gen_args);
    CLI::App* analyze = app.add_subcommand("analyze", "measure one graph file");
    attach_common(analyze, analyze_args);
    CLI::App* classify = app.add_subcommand(
        "classify", "run an ensemble and classify its cover-time type");
    attach_common(classify, classify_args);
    CLI::App* catalog = app.add_subcommand(
        "catalog", "run the full acceptance catalog and write its reports");
    attach_common(catalog, catalog_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        json err;
        err["error"] = {{"code", "bad_command_line"}, {"message", e.what()}};
        std::fputs(ctlab::dump_report(err).c_str(), stdout);
        return 2;
    }

    std::string command;
    CommonArgs* args = nullptr;
    if (gen->parsed()) { command = "gen"; args = &gen_args; }
    else if (analyze->parsed()) { command = "analyze"; args = &analyze_args; }
    else if (classify->parsed()) { command = "classify"; args = &classify_args; }
    else { command = "catalog"; args = &catalog_args; }

    try {
        json conf = load_config(args->config_path);
        std::map<std::string, std::string> files;
        if (command == "gen") {
            ctlab::GenConfig cfg = ctlab::parse_gen_config(conf);
            cfg.threads = settle_threads(args->threads, cfg.threads);
            files = ctlab::execute_gen(cfg);
        } else if (command == "analyze") {
            ctlab::AnalyzeConfig cfg = ctlab::parse_analyze_config(conf);
            cfg.threads = settle_threads(args->threads, cfg.threads);
            files = ctlab::execute_analyze(cfg);
        } else if (command == "classify") {
            ctlab::ClassifyConfig cfg = ctlab::parse_classify_config(conf);
            cfg.threads = settle_threads(args->threads, cfg.threads);
            files = ctlab::execute_classify(cfg);
        } else {
            ctlab::CatalogConfig cfg = ctlab::parse_catalog_config(conf);
            cfg.threads = settle_threads(args->threads, cfg.threads);
            files = ctlab::execute_catalog(cfg);
        }
        write_files(args->out_dir, files);
        emit_success(command, args->out_dir, files);
        return 0;
    } catch (const ctlab::Error& e) {
        std::string msg = e.what();
        std::string prefix = std::string(ctlab::error_code_name(e.code())) + ": ";
        if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
        json err;
        err["error"] = {{"code", ctlab::error_code_name(e.code())},
                        {"message", msg}};
        std::fputs(ctlab::dump_report(err).c_str(), stdout);
        return ctlab::exit_code_for(e.code());
    } catch (const std::exception& e) {
        json err;
        err["error"] = {{"code", "internal"}, {"message", e.what()}};
        std::fputs(ctlab::dump_report(err).c_str(), stdout);
        return 3;
    }
}
