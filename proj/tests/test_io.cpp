#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dfmo/io.hpp"

using namespace dfmo;
namespace fs = std::filesystem;

namespace {

IterationRecord record(std::size_t k, bool with_selection) {
    IterationRecord r;
    r.k = k;
    r.list_size = 3 + k;
    r.delta_bar = 0.1 * static_cast<double>(k + 1);
    r.xi = 1.0 / 3.0;
    r.hi = 42.123456789012345;
    r.phi_delta = -42.0;
    r.phi_xi = -41.0 - 1e-17;
    r.nf_cum = 10 * k;
    r.success = k % 2 == 0;
    if (with_selection) r.selected_id = 7 + k;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dfmo_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("'") + DFMO_CLI_PATH + "' " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(EmitTrace, EmptyTraceIsHeaderOnly) {
    std::ostringstream os;
    emit_trace({}, OutputFormat::csv, os, false);
    EXPECT_EQ(os.str(), "k,list_size,delta_bar,xi,hi,phi_delta,phi_xi,nf_cum,success,selected_id\n");
    std::ostringstream js;
    emit_trace({}, OutputFormat::json, js, false);
    EXPECT_EQ(js.str(), "[]\n");
}

TEST(EmitTrace, OneRecordIsTwoLines) {
    std::ostringstream os;
    emit_trace({record(0, false)}, OutputFormat::csv, os, false);
    const std::string s = os.str();
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);
    EXPECT_NE(s.find("\n0,3,0.10000000000000001,"), std::string::npos);
}

TEST(EmitTrace, CsvRoundTripIsExact) {
    for (bool crit : {false, true}) {
        std::vector<IterationRecord> trace;
        for (std::size_t k = 0; k < 5; ++k) {
            auto r = record(k, k % 3 != 0);
            if (crit && k != 2) {
                r.gamma_max = 0.5 / static_cast<double>(k + 1);
                r.gamma_min = 1e-17 * static_cast<double>(k);
            }
            trace.push_back(r);
        }
        std::stringstream ss;
        emit_trace(trace, OutputFormat::csv, ss, crit);
        const auto back = parse_trace_csv(ss);
        ASSERT_EQ(back.size(), trace.size());
        for (std::size_t k = 0; k < trace.size(); ++k) {
            EXPECT_EQ(back[k].k, trace[k].k);
            EXPECT_EQ(back[k].list_size, trace[k].list_size);
            EXPECT_EQ(back[k].delta_bar, trace[k].delta_bar);
            EXPECT_EQ(back[k].xi, trace[k].xi);
            EXPECT_EQ(back[k].hi, trace[k].hi);
            EXPECT_EQ(back[k].phi_delta, trace[k].phi_delta);
            EXPECT_EQ(back[k].phi_xi, trace[k].phi_xi);
            EXPECT_EQ(back[k].nf_cum, trace[k].nf_cum);
            EXPECT_EQ(back[k].success, trace[k].success);
            EXPECT_EQ(back[k].selected_id, trace[k].selected_id);
            if (crit) {
                EXPECT_EQ(back[k].gamma_max, trace[k].gamma_max);
                EXPECT_EQ(back[k].gamma_min, trace[k].gamma_min);
            }
        }
    }
}

TEST(EmitTrace, JsonIsParseable) {
    std::ostringstream os;
    emit_trace({record(0, true), record(1, false)}, OutputFormat::json, os, true);
    const auto j = nlohmann::json::parse(os.str());
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["selected_id"], 7);
    EXPECT_TRUE(j[1]["selected_id"].is_null());
    EXPECT_TRUE(j[0]["gamma_max"].is_null());
    EXPECT_EQ(j[0]["hi"].get<double>(), 42.123456789012345);
    EXPECT_EQ(j[0]["success"], true);
}

TEST(EmitFront, CsvColumnsAndJson) {
    std::vector<ListEntry> entries{
        ListEntry{DecisionPoint(Vector{1.0}), ObjectiveVector(Vector{1.0, 0.5}), StepsizeVector(Vector{0.5, 0.25}),
                  1, std::nullopt, 0},
        ListEntry{DecisionPoint(Vector{0.0}), ObjectiveVector(Vector{0.0, 16.0 / 18.0}),
                  StepsizeVector(Vector{0.5, 0.5}), 2, EntryId{1}, 3},
    };
    const auto front = filter_nondominated(entries);
    std::ostringstream os;
    emit_front(front, OutputFormat::csv, os);
    EXPECT_EQ(os.str(),
              "id,parent_id,born_iter,x1,f1,f2,alpha1,alpha2\n"
              "1,,0,1,1,0.5,0.5,0.25\n"
              "2,1,3,0,0,0.88888888888888884,0.5,0.5\n");
    std::ostringstream js;
    emit_front(front, OutputFormat::json, js);
    const auto j = nlohmann::json::parse(js.str());
    ASSERT_EQ(j.size(), 2u);
    EXPECT_TRUE(j[0]["parent_id"].is_null());
    EXPECT_EQ(j[1]["parent_id"], 1);
    EXPECT_EQ(j[1]["f"][1].get<double>(), 16.0 / 18.0);
}

TEST(Config, JsonRoundTrip) {
    RunConfig c;
    c.problem = "remark_a1_n2";
    c.x0 = {{1.0, 2.0}, {0.1, 0.3}};
    c.algo = Algorithm::light;
    c.strategy = SelectionKind::round_robin;
    c.params.theta = 0.3;
    c.params.seed = 99;
    c.params.stop = StoppingRule{};
    c.params.stop.max_evals = 500;
    c.r_extra = 3;
    c.f_max = Vector{98.0, 25.0 / 9.0};
    c.trace_criticality = true;
    const auto back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(back.x0, c.x0);
    EXPECT_EQ(back.params.stop.max_evals, std::optional<std::size_t>(500));
    EXPECT_FALSE(back.params.stop.delta_tol);
    EXPECT_THROW(config_from_json(nlohmann::json{{"algo", "fast"}}), ConfigError);
}

TEST(Cli, WritesAllArtifacts) {
    const auto dir = scratch("basic");
    ASSERT_EQ(run_cli("run --problem remark_a1 --max-iters 5 --out '" + dir.string() + "'"), 0);
    for (const char* f : {"trace.csv", "front.csv", "lineage.csv", "config.json", "summary.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    std::ifstream is(dir / "trace.csv");
    const auto trace = parse_trace_csv(is);
    ASSERT_EQ(trace.size(), 6u);
    EXPECT_EQ(trace.back().k, 5u);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    EXPECT_EQ(summary["stop_reason"], "max_iters");
}

TEST(Cli, LightTraceRecordsSelection) {
    const auto dir = scratch("light");
    ASSERT_EQ(run_cli("run --algo light --strategy min --max-iters 4 --trace-criticality --format json --out '" +
                      dir.string() + "'"),
              0);
    const auto j = nlohmann::json::parse(slurp(dir / "trace.json"));
    ASSERT_EQ(j.size(), 5u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_TRUE(j[k]["selected_id"].is_number()) << k;
    EXPECT_TRUE(j[0]["gamma_max"].is_number());
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("codes");
    EXPECT_EQ(run_cli("run --eta 0.3 --gamma 0.5 --max-iters 2 --out '" + dir.string() + "'"), 2);
    EXPECT_EQ(run_cli("run --problem nope --out '" + dir.string() + "'"), 2);
    EXPECT_EQ(run_cli("run --theta 1.5 --out '" + dir.string() + "'"), 2);
    EXPECT_EQ(run_cli("run --bogus-flag"), 2);
    EXPECT_EQ(run_cli("run --max-evals 30 --delta-tol 1e-9 --out '" + dir.string() + "'"), 4);
    EXPECT_EQ(run_cli("run --external-cmd \"'" + std::string(DFMO_TESTSERVER_PATH) + "' nan\" --x0 1 --out '" +
                      dir.string() + "'"),
              3);
}

TEST(Cli, ExternalProblemMatchesBuiltin) {
    const auto a = scratch("builtin"), b = scratch("external");
    ASSERT_EQ(run_cli("run --problem remark_a1 --x0 1 --max-iters 6 --ref-point 50,2.5 --out '" + a.string() + "'"),
              0);
    ASSERT_EQ(run_cli("run --external-cmd \"'" + std::string(DFMO_TESTSERVER_PATH) +
                      "' remark_a1\" --x0 1 --max-iters 6 --ref-point 50,2.5 --out '" + b.string() + "'"),
              0);
    EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
    EXPECT_EQ(slurp(a / "front.csv"), slurp(b / "front.csv"));
}

TEST(Cli, ConfigReplayIsByteIdentical) {
    const auto a = scratch("replay_a"), b = scratch("replay_b"), c = scratch("replay_c");
    const std::string flags = "run --problem remark_a1_n2 --r-extra 2 --seed 5 --max-iters 6 --out ";
    ASSERT_EQ(run_cli(flags + "'" + a.string() + "'"), 0);
    ASSERT_EQ(run_cli(flags + "'" + b.string() + "'"), 0);
    ASSERT_EQ(run_cli("run --config '" + (a / "config.json").string() + "' --out '" + c.string() + "'"), 0);
    for (const char* f : {"trace.csv", "front.csv", "lineage.csv", "config.json", "summary.json"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
    }
}
