#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hiernet/Errors.hh"
#include "hiernet/Explorer.hh"

using namespace hiernet;

namespace {

const char* kBundledConfig = HIERNET_SOURCE_DIR "/configs/sweep_1024npu.json";

std::string minimal_config(const std::string& extra = "") {
  return R"json({
    "topologies": ["Ring(4)_Switch(8)"],
    "workloads": [
      {"name": "tiny", "params": 1e9, "mp_size": 4, "dp_size": 8,
       "mp_comm_bytes": 1e9, "compute_time": 0.01}
    ],
    "budgets": [100, 200],
    "schemes": ["equal", "smart"])json" +
         extra + "\n}";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string error_of(const std::string& config_text) {
  try {
    parse_sweep_config(config_text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  auto cfg = parse_sweep_config(minimal_config());
  REQUIRE(cfg.topologies.size() == 1);
  CHECK(topology_name(cfg.topologies[0]) == "Ring(4)_Switch(8)");
  REQUIRE(cfg.workloads.size() == 1);
  CHECK(cfg.workloads[0].name == "tiny");
  CHECK(cfg.workloads[0].bytes_per_param == 2.0);
  CHECK(!cfg.workloads[0].dp_comm_bytes.has_value());
  CHECK(cfg.budgets == std::vector<double>{100.0, 200.0});
  REQUIRE(cfg.schemes.size() == 2);
  CHECK(cfg.schemes[1] == AllocScheme::SmartBW);
  CHECK(cfg.net.link_latency == 500e-9);
  CHECK(cfg.net.chunks == 4);
  CHECK(cfg.costs.link_per_gbps == 2.0);
  CHECK(cfg.output_path == ".");
  CHECK(cfg.output_format == "csv");
}

TEST_CASE("net, costs, and output sections override defaults") {
  auto cfg = parse_sweep_config(minimal_config(R"(,
    "net": {"link_latency": 1e-6, "chunks": 8, "hops_switch": 3},
    "costs": {"nic_per_gbps": 50},
    "output": {"path": "out", "format": "json"},
    "max_dims": 6)"));
  CHECK(cfg.net.link_latency == 1e-6);
  CHECK(cfg.net.chunks == 8);
  CHECK(cfg.net.hops_switch == 3);
  CHECK(cfg.net.hops_ring == 1);
  CHECK(cfg.costs.nic_per_gbps == 50.0);
  CHECK(cfg.costs.link_per_gbps == 2.0);
  CHECK(cfg.output_path == "out");
  CHECK(cfg.output_format == "json");
  CHECK(cfg.max_dims == 6);
}

TEST_CASE("topology records are equivalent to strings") {
  auto cfg = parse_sweep_config(R"json({
    "topologies": [[{"kind": "Ring", "size": 4},
                    {"kind": "FullyConnected", "size": 2}]],
    "workloads": [{"name": "w", "params": 1e9, "mp_size": 1, "dp_size": 8,
                   "compute_time": 1.0}],
    "budgets": [100],
    "schemes": ["equal"]
  })json");
  CHECK(topology_name(cfg.topologies[0]) == "Ring(4)_FC(2)");
}

TEST_CASE("config errors carry the offending location") {
  SUBCASE("unknown top-level field") {
    auto err = error_of(minimal_config(R"(, "budgetz": [1])"));
    CHECK(contains(err, "config error at /budgetz"));
    CHECK(contains(err, "unknown field"));
  }
  SUBCASE("unknown workload field") {
    auto err = error_of(R"json({
      "topologies": ["Ring(4)"],
      "workloads": [{"name": "w", "params": 1, "mp_size": 1, "dp_size": 4,
                     "compute_time": 1, "mp_bytes": 5}],
      "budgets": [100], "schemes": ["equal"]
    })json");
    CHECK(contains(err, "/workloads[0].mp_bytes"));
    CHECK(contains(err, "unknown field"));
  }
  SUBCASE("wrong type") {
    auto err = error_of(R"json({
      "topologies": ["Ring(4)"],
      "workloads": [
        {"name": "a", "params": 1, "mp_size": 1, "dp_size": 4,
         "compute_time": 1},
        {"name": "b", "params": 1, "mp_size": 1.5, "dp_size": 4,
         "compute_time": 1}
      ],
      "budgets": [100], "schemes": ["equal"]
    })json");
    CHECK(contains(err, "config error at /workloads[1].mp_size"));
    CHECK(contains(err, "expected an integer"));
  }
  SUBCASE("missing required field") {
    auto err = error_of(R"json({
      "topologies": ["Ring(4)"],
      "workloads": [{"name": "w", "params": 1, "mp_size": 1, "dp_size": 4}],
      "budgets": [100], "schemes": ["equal"]
    })json");
    CHECK(contains(err, "/workloads[0]"));
    CHECK(contains(err, "missing required field"));
    CHECK(contains(err, "compute_time"));
  }
  SUBCASE("bad scheme name") {
    auto err = error_of(R"json({
      "topologies": ["Ring(4)"],
      "workloads": [{"name": "w", "params": 1, "mp_size": 1, "dp_size": 4,
                     "compute_time": 1}],
      "budgets": [100], "schemes": ["fastest"]
    })json");
    CHECK(contains(err, "/schemes[0]"));
  }
  SUBCASE("malformed JSON") {
    CHECK_THROWS_AS(parse_sweep_config("{"), ConfigError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_sweep_config("/nonexistent/sweep.json"),
                    ConfigError);
  }
}

TEST_CASE("bundled sweep evaluates every combination") {
  auto cfg = load_sweep_config(kBundledConfig);
  REQUIRE(cfg.topologies.size() == 3);
  REQUIRE(cfg.workloads.size() == 3);
  REQUIRE(cfg.budgets.size() == 5);
  REQUIRE(cfg.schemes.size() == 3);
  for (const auto& t : cfg.topologies) CHECK(t.npu_count() == 1024);

  auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 3 * 3 * 3 * 5);
  for (const auto& r : rows) {
    CAPTURE(r.topology);
    CAPTURE(r.workload);
    CAPTURE(r.scheme);
    CAPTURE(r.budget_gbps);
    CHECK(r.ok);
    CHECK(r.iteration_time_s > 0);
    CHECK(r.comm_time_s > 0);
    CHECK(r.avg_bw_utilization > 0);
    CHECK(r.avg_bw_utilization <= 1.0 + 1e-12);
    CHECK(r.cost_total_usd > 0);
    CHECK(r.perf_per_cost > 0);
  }

  SUBCASE("row order follows the config axes, budgets innermost") {
    CHECK(rows[0].topology == topology_name(cfg.topologies[0]));
    CHECK(rows[0].workload == cfg.workloads[0].name);
    CHECK(rows[0].scheme == "equal");
    CHECK(rows[0].budget_gbps == 100.0);
    CHECK(rows[1].budget_gbps == 200.0);
    CHECK(rows[5].scheme == "message");
    CHECK(rows[15].workload == cfg.workloads[1].name);
    CHECK(rows[45].topology == topology_name(cfg.topologies[1]));
  }
  SUBCASE("normalization baseline is equal at the lowest budget") {
    std::map<std::pair<std::string, std::string>, double> base;
    for (const auto& r : rows) {
      if (r.scheme == "equal" && r.budget_gbps == 100.0) {
        base[{r.topology, r.workload}] = r.iteration_time_s;
        CHECK(r.normalized_time == doctest::Approx(1.0));
      }
    }
    for (const auto& r : rows) {
      CHECK(r.normalized_time ==
            doctest::Approx(r.iteration_time_s /
                            base.at({r.topology, r.workload})));
    }
  }
  SUBCASE("more budget never slows an ok row down") {
    for (size_t i = 1; i < rows.size(); i++) {
      if (rows[i].scheme == rows[i - 1].scheme &&
          rows[i].workload == rows[i - 1].workload &&
          rows[i].topology == rows[i - 1].topology) {
        CHECK(rows[i].iteration_time_s <=
              rows[i - 1].iteration_time_s * (1 + 1e-9));
      }
    }
  }
}

TEST_CASE("incompatible combinations are skipped with a reason") {
  auto cfg = parse_sweep_config(R"json({
    "topologies": ["Ring(4)_Switch(8)", "Ring(4)_Switch(6)"],
    "workloads": [
      {"name": "fits", "params": 1e9, "mp_size": 4, "dp_size": 8,
       "mp_comm_bytes": 1e9, "compute_time": 0.01},
      {"name": "wrong-npus", "params": 1e9, "mp_size": 4, "dp_size": 16,
       "mp_comm_bytes": 1e9, "compute_time": 0.01}
    ],
    "budgets": [100],
    "schemes": ["equal"]
  })json");
  auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 4);

  // (Ring(4)_Switch(8), fits) works; wrong-npus wants 64 NPUs out of 32.
  CHECK(rows[0].ok);
  CHECK(!rows[1].ok);
  CHECK(contains(rows[1].reason, "64"));
  CHECK(std::isnan(rows[1].iteration_time_s));
  CHECK(std::isnan(rows[1].normalized_time));
  // Switch(6) cannot run halving-doubling: both workloads skip.
  CHECK(!rows[2].ok);
  CHECK(!rows[2].reason.empty());
  CHECK(!rows[3].ok);
}

TEST_CASE("duplicate combinations are evaluated once") {
  auto cfg = parse_sweep_config(minimal_config());
  cfg.budgets = {100.0, 100.0, 200.0};
  auto rows = run_sweep(cfg);
  CHECK(rows.size() == 2 * 2);  // schemes x unique budgets
}

TEST_CASE("csv output is stable and well-formed") {
  auto cfg = parse_sweep_config(minimal_config());
  auto rows = run_sweep(cfg);
  auto csv = render_csv(rows);

  CHECK(contains(
      csv,
      "topology,workload,scheme,budget_gbps,iteration_time_s,"
      "compute_time_s,mp_comm_time_s,dp_comm_time_s,comm_time_s,"
      "avg_bw_utilization,normalized_time,cost_total_usd,cost_link_usd,"
      "cost_nic_usd,cost_switch_usd,perf_per_cost,bw_per_dim_gbps,"
      "util_per_dim,traffic_per_dim_bytes,status,reason"));
  CHECK(csv.back() == '\n');
  size_t lines = 0;
  for (char c : csv) lines += (c == '\n');
  CHECK(lines == rows.size() + 1);
  CHECK(contains(csv, ",ok,"));
  // Determinism: rendering twice gives the same bytes.
  CHECK(csv == render_csv(rows));

  SUBCASE("skipped rows leave metric cells empty") {
    ReportRow r;
    r.topology = "Ring(4)";
    r.workload = "w";
    r.scheme = "equal";
    r.budget_gbps = 100.0;
    r.ok = false;
    r.reason = "does not fit";
    r.iteration_time_s = std::nan("");
    r.normalized_time = std::nan("");
    auto text = render_csv({r});
    CHECK(contains(text, "Ring(4),w,equal,100,,"));
    CHECK(contains(text, "skipped,does not fit"));
  }
  SUBCASE("cells with commas are quoted") {
    ReportRow r;
    r.topology = "Ring(4)";
    r.workload = "w";
    r.scheme = "equal";
    r.ok = false;
    r.reason = "a, b \"c\"";
    auto text = render_csv({r});
    CHECK(contains(text, "\"a, b \"\"c\"\"\""));
  }
}

TEST_CASE("json output mirrors the rows") {
  auto cfg = parse_sweep_config(minimal_config());
  auto rows = run_sweep(cfg);
  auto j = rows_to_json(rows);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == rows.size());
  CHECK(j[0]["topology"] == rows[0].topology);
  CHECK(j[0]["status"] == "ok");
  CHECK(j[0]["iteration_time_s"].get<double>() ==
        doctest::Approx(rows[0].iteration_time_s));
  CHECK(j[0]["bw_per_dim_gbps"].size() == rows[0].bw_per_dim_gbps.size());

  ReportRow skipped;
  skipped.topology = "Ring(4)";
  skipped.workload = "w";
  skipped.scheme = "equal";
  skipped.ok = false;
  skipped.reason = "nope";
  skipped.iteration_time_s = std::nan("");
  auto js = rows_to_json({skipped});
  CHECK(js[0]["iteration_time_s"].is_null());
  CHECK(js[0]["status"] == "skipped");
  CHECK(js[0]["reason"] == "nope");
}

TEST_CASE("emit_report writes the requested file") {
  auto cfg = parse_sweep_config(minimal_config());
  auto rows = run_sweep(cfg);
  auto dir = std::filesystem::temp_directory_path() / "hiernet_report_test";
  std::filesystem::remove_all(dir);

  emit_report(rows, dir.string(), "csv");
  std::ifstream in(dir / "report.csv");
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text == render_csv(rows));

  emit_report(rows, dir.string(), "json");
  CHECK(std::filesystem::exists(dir / "report.json"));

  CHECK_THROWS_AS(emit_report({}, dir.string(), "csv"),
                  std::invalid_argument);
  CHECK_THROWS_AS(emit_report(rows, dir.string(), "xml"),
                  std::invalid_argument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("workload files load standalone") {
  auto w = load_workload_file(HIERNET_SOURCE_DIR
                              "/configs/workloads/gpt3_175b.json");
  CHECK(w.name == "gpt3-175b");
  CHECK(w.mp_size == 16);
  CHECK(w.dp_size == 64);
  CHECK(w.mp_comm_bytes == 900e9);
  CHECK_THROWS_AS(load_workload_file("/nonexistent/w.json"), ConfigError);
}

TEST_CASE("outermost-dimension traffic drops with hierarchy depth") {
  auto cfg = load_sweep_config(kBundledConfig);
  auto rows = nic_traffic_report(cfg);
  REQUIRE(rows.size() == 9);

  // Group by workload; topologies are config-ordered 2D, 3D, 4D.
  std::map<std::string, std::vector<const NicTrafficRow*>> by_workload;
  for (const auto& r : rows) by_workload[r.workload].push_back(&r);
  REQUIRE(by_workload.size() == 3);
  for (const auto& [name, entries] : by_workload) {
    CAPTURE(name);
    REQUIRE(entries.size() == 3);
    CHECK(entries[0]->dim_count == 2);
    CHECK(entries[1]->dim_count == 3);
    CHECK(entries[2]->dim_count == 4);
    CHECK(entries[0]->last_dim_bytes > entries[1]->last_dim_bytes);
    CHECK(entries[1]->last_dim_bytes > entries[2]->last_dim_bytes);
    // The deepest topology is the multiplier reference.
    CHECK(entries[2]->multiplier == doctest::Approx(1.0));
    CHECK(entries[0]->multiplier ==
          doctest::Approx(entries[0]->last_dim_bytes /
                          entries[2]->last_dim_bytes));
  }

  SUBCASE("csv rendering") {
    auto csv = render_nic_csv(rows);
    CHECK(contains(csv,
                   "workload,topology,dim_count,last_dim_traffic_bytes,"
                   "nic_multiplier"));
    size_t lines = 0;
    for (char c : csv) lines += (c == '\n');
    CHECK(lines == rows.size() + 1);
  }
}

TEST_CASE("outermost-dimension traffic scales with the payload") {
  Topology t = parse_topology("Ring(8)_Switch(128)");
  Workload w;
  w.name = "dp";
  w.params = 10e9;
  w.mp_size = 1;
  w.dp_size = 1024;
  w.compute_time = 1.0;
  w.validate();
  double base = last_dim_traffic(t, w);
  CHECK(base > 0);
  w.params = 20e9;
  CHECK(last_dim_traffic(t, w) == doctest::Approx(2 * base));
}
