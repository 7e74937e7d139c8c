// Copyright 2026 The riskcal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// riskcal: disclosure-risk calibration workbench.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "riskcal/curation.hpp"
#include "riskcal/error.hpp"
#include "riskcal/http_api.hpp"
#include "riskcal/redaction.hpp"
#include "riskcal/risk_metrics.hpp"
#include "riskcal/workflow.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace riskcal;

namespace {

struct Globals {
  std::string qi_dict;
  std::string manifest;
  std::string source;
  std::string format = "json";
  bool acknowledge = false;
};

QuasiIdentifierDictionary dictionary(const Globals& g) {
  return QuasiIdentifierDictionary::load_configured(g.qi_dict.empty() ? std::nullopt : std::optional(g.qi_dict));
}

std::optional<std::string> source_of(const Globals& g) {
  return g.source.empty() ? std::nullopt : std::optional(g.source);
}

std::shared_ptr<CollectionContext> open_collection(const Globals& g) {
  if (g.manifest.empty()) throw Error(ErrorCode::kUnknownCollection, "--manifest is required");
  return CollectionContext::open(g.manifest, source_of(g), dictionary(g));
}

std::string acknowledgment(const Globals& g) { return g.acknowledge ? std::string(kRiskAcknowledgment) : ""; }

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<std::string> parse_qis(const std::string& spec) {
  if (spec.rfind("profile:", 0) == 0) return {spec};
  std::vector<std::string> out;
  for (const auto& p : split(spec, ',')) {
    if (!trim(p).empty()) out.emplace_back(trim(p));
  }
  return out;
}

std::vector<std::string> resolve_qis(const std::string& spec, const QuasiIdentifierDictionary& dict) {
  auto qis = parse_qis(spec);
  if (qis.size() == 1 && qis[0].rfind("profile:", 0) == 0) return dict.profile(qis[0].substr(8));
  for (auto& q : qis) q = normalize_attribute(q);
  if (qis.empty()) throw Error(ErrorCode::kEmptySelection, "no quasi-identifiers given");
  return qis;
}

// ---------------------------------------------------------------------------

struct HarvestArgs {
  std::string cache_dir;
  bool refresh = false;
  std::size_t limit = 50000;
  std::string labels;
  std::size_t min_qi = 2;
};

int run_harvest(const Globals& g, const HarvestArgs& a) {
  const auto dict = dictionary(g);
  if (g.source.empty()) throw Error(ErrorCode::kInvalidArgument, "--source is required");
  auto source = open_source(g.source, dict);
  CatalogCache cache(a.cache_dir);
  HarvestOptions opts;
  opts.refresh = a.refresh;
  opts.limit = a.limit;
  const auto report = harvest(*source, &cache, opts);
  auto manifest = make_manifest(report.metadata, dict, a.min_qi);
  if (!a.labels.empty()) apply_labels(manifest, load_labels(a.labels));
  const auto path = fs::path(a.cache_dir) / "collection.jsonl";
  save_manifest(manifest, path);
  std::cerr << "harvested " << report.metadata.size() << " resources from " << report.portals.size() << " portals ("
            << report.tables_fetched << " tables fetched, " << report.tables_cached << " cached, "
            << report.rows_dropped << " ragged rows dropped)\n"
            << "manifest: " << path.string() << '\n';
  std::cout << funnel_report(manifest).to_text() << '\n';
  return 0;
}

struct CurateArgs {
  std::vector<std::string> labels;
  std::string labels_file;
  bool review_rejected = false;
};

CurationLabel label_from_flag(const std::string& text, std::string& ref) {
  const auto eq = text.rfind('=');
  if (eq == std::string::npos) throw Error(ErrorCode::kInvalidLabel, "expected ref=relevance[:granularity]: " + text);
  ref = text.substr(0, eq);
  const auto value = text.substr(eq + 1);
  const auto colon = value.find(':');
  CurationLabel l;
  l.relevance = parse_relevance(value.substr(0, colon));
  l.granularity = colon == std::string::npos ? Granularity::kUnknown : parse_granularity(value.substr(colon + 1));
  l.labeled_at = now_seconds();
  return l;
}

std::optional<CurationLabel> prompt_label(const ManifestEntry& e) {
  std::cout << "\n" << e.metadata.ref() << "  " << e.metadata.title << "\n  attributes: "
            << join(e.metadata.attribute_names(), ", ") << "\n  quasi-identifiers: " << join(e.qi_hits, ", ")
            << "\n  relevance [h]uman-subject / [n]on-human / [s]kip / [q]uit: " << std::flush;
  std::string answer;
  if (!std::getline(std::cin, answer)) return std::nullopt;
  answer = to_lower_ascii(trim(answer));
  if (answer == "q") return std::nullopt;
  CurationLabel l;
  l.labeled_at = now_seconds();
  if (answer == "n") {
    l.relevance = Relevance::kNonHuman;
    return l;
  }
  if (answer != "h") return CurationLabel{};
  l.relevance = Relevance::kHumanSubject;
  while (true) {
    std::cout << "  granularity [i]ndividual-record / [a]ggregate: " << std::flush;
    if (!std::getline(std::cin, answer)) return std::nullopt;
    answer = to_lower_ascii(trim(answer));
    if (answer == "i" || answer == "a") break;
  }
  l.granularity = answer == "i" ? Granularity::kIndividualRecord : Granularity::kAggregate;
  return l;
}

int run_curate(const Globals& g, const CurateArgs& a) {
  if (g.manifest.empty()) throw Error(ErrorCode::kUnknownCollection, "--manifest is required");
  auto manifest = load_manifest(g.manifest);
  const auto dict = dictionary(g);
  if (a.review_rejected) {
    auto source = open_source(g.source.empty() ? fs::path(g.manifest).parent_path().string() : g.source, dict);
    std::vector<DatasetMetadata> harvested;
    for (const auto& p : source->discover_portals()) {
      for (auto& m : source->harvest_metadata(p)) harvested.push_back(std::move(m));
    }
    for (const auto& m : rejected_by_qi(harvested, dict)) {
      std::cout << m.ref() << "  " << m.title << "  [" << join(m.attribute_names(), ", ") << "]\n";
    }
    return 0;
  }
  bool changed = false;
  if (!a.labels_file.empty()) {
    apply_labels(manifest, load_labels(a.labels_file));
    changed = true;
  }
  for (const auto& text : a.labels) {
    std::string ref;
    const auto l = label_from_flag(text, ref);
    manifest.apply_label(ref, l);
    changed = true;
  }
  if (!changed) {
    for (const auto& [ref, e] : manifest.entries()) {
      if (e.label.relevance != Relevance::kUndecided) continue;
      const auto l = prompt_label(e);
      if (!l) break;
      if (l->relevance == Relevance::kUndecided) continue;
      manifest.apply_label(ref, *l);
      changed = true;
    }
  }
  if (changed) save_manifest(manifest, g.manifest);
  std::cout << funnel_report(manifest).to_text() << '\n';
  return 0;
}

int run_funnel(const Globals& g) {
  if (g.manifest.empty()) throw Error(ErrorCode::kUnknownCollection, "--manifest is required");
  const auto report = funnel_report(load_manifest(g.manifest));
  if (g.format == "text") {
    std::cout << report.to_text() << '\n';
  } else {
    std::cout << report.to_json_text();
  }
  return 0;
}

struct ScanArgs {
  std::string target;
  std::string keys = "auto";
  std::size_t threshold = kDefaultEntryPointThreshold;
  bool subsets = false;
};

void print_scan_text(const json& scan) {
  const auto& s = scan["summary"];
  std::cout << scan["dataset"].get<std::string>() << ": k=" << s["k"] << " classes=" << s["class_count"]
            << " singletons=" << s["singleton_classes"] << " key=[" << join(s["key_attrs"], ", ") << "]\n";
  for (const auto& f : scan["findings"]) {
    std::cout << "  size " << f["class_size"] << "  (" << join(f["key_attrs"], ", ") << ") = (" << join(f["key"], ", ")
              << ")\n";
  }
}

int run_scan(const Globals& g, const ScanArgs& a) {
  const auto ctx = open_collection(g);
  const bool redact = !g.acknowledge;
  std::vector<std::string> targets;
  if (a.target == "collection") {
    for (const auto& m : ctx->collection()) targets.push_back(m.ref());
  } else {
    targets.push_back(a.target);
  }
  const auto keys = a.keys == "auto" ? std::vector<std::string>{"auto"} : parse_qis(a.keys);
  json out = json::array();
  for (const auto& t : targets) {
    auto scan = scan_dataset(*ctx, t, keys, a.threshold, a.subsets, redact);
    if (g.format == "text") {
      print_scan_text(scan);
    } else {
      out.push_back(std::move(scan));
    }
  }
  if (g.format != "text") print(a.target == "collection" ? out : out[0]);
  return 0;
}

struct ClusterArgs {
  std::string qis = "profile:police";
  double cut = kDefaultDistanceCut;
  std::string cluster;
};

std::vector<DatasetCluster> ranked_clusters(const CollectionContext& ctx, const ClusterArgs& a) {
  return rank_clusters(cluster_datasets(ctx.collection(), a.cut), resolve_qis(a.qis, ctx.dictionary()));
}

int run_cluster(const Globals& g, const ClusterArgs& a) {
  const auto ctx = open_collection(g);
  const auto ranked = ranked_clusters(*ctx, a);
  if (g.format == "text") {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      const auto& c = ranked[i];
      std::cout << i + 1 << ". " << c.id << "  members=" << c.size() << " qi_overlap=" << c.qi_overlap << "\n   core: "
                << join({c.core_signature.begin(), c.core_signature.end()}, ", ") << '\n';
    }
    return 0;
  }
  json out = json::array();
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    auto j = to_json(ranked[i]);
    j["rank"] = i + 1;
    out.push_back(std::move(j));
  }
  print({{"cut", a.cut}, {"clusters", out}});
  return 0;
}

int run_pairs(const Globals& g, const ClusterArgs& a) {
  const auto ctx = open_collection(g);
  const auto ranked = ranked_clusters(*ctx, a);
  const DatasetCluster* chosen = ranked.empty() ? nullptr : &ranked.front();
  if (!a.cluster.empty()) {
    chosen = nullptr;
    for (const auto& c : ranked) {
      if (c.id == a.cluster) chosen = &c;
    }
    if (!chosen) throw Error(ErrorCode::kInvalidArgument, "no cluster " + a.cluster);
  }
  if (!chosen) throw Error(ErrorCode::kEmptyCollection, "no clusters");
  const auto pairs = rank_pairs(chosen->members, ctx->lookup(), ctx->dictionary());
  if (g.format == "text") {
    std::cout << chosen->id << ": " << pair_count(chosen->size()) << " pairs\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& p = pairs[i];
      std::cout << i + 1 << ". " << p.spec.left_id << " x " << p.spec.right_id << "  risk=" << p.score.risk
                << " containment=" << p.score.containment << " key=[" << join(p.spec.key_attrs, ", ") << "]\n";
    }
    return 0;
  }
  json out = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto j = to_json(pairs[i]);
    j["rank"] = i + 1;
    out.push_back(std::move(j));
  }
  print({{"cluster", chosen->id}, {"pair_count", pair_count(chosen->size())}, {"pairs", out}});
  return 0;
}

struct JoinArgs {
  std::string left;
  std::string right;
  std::string key = "auto";
  std::size_t row_cap = kDefaultJoinRowCap;
};

int run_join(const Globals& g, const JoinArgs& a) {
  const auto ctx = open_collection(g);
  const auto& left = ctx->table(a.left);
  const auto& right = ctx->table(a.right);
  JoinSpec spec{a.left, a.right, {}};
  if (a.key == "auto") {
    spec.key_attrs = auto_join_key(left, right, ctx->dictionary());
  } else {
    for (const auto& k : parse_qis(a.key)) spec.key_attrs.push_back(normalize_attribute(k));
  }
  const bool redact = !g.acknowledge;
  const auto result = execute_join(left, right, spec, a.row_cap);
  const auto found = detect_disclosures(result, left.attributes(), right.attributes(), ctx->dictionary());
  json out{{"spec", to_json(spec)},
           {"score", to_json(joinability_risk(left, right, spec.key_attrs))},
           {"matched_keys", result.matches.size()},
           {"joined_rows", result.joined_rows.size()},
           {"total_joined_rows", result.total_joined_rows},
           {"truncated", result.truncated},
           {"redacted", redact},
           {"disclosures", disclosure_records(*ctx, spec, found, redact)}};
  if (g.format == "text") {
    std::cout << a.left << " x " << a.right << " on [" << join(spec.key_attrs, ", ") << "]: " << result.matches.size()
              << " matched keys, " << result.total_joined_rows << " joined rows, "
              << out["disclosures"]["identity_count"] << " identity / " << out["disclosures"]["attribute_count"]
              << " attribute candidates\n";
    for (const auto& c : out["disclosures"]["candidates"]) {
      std::cout << "  " << c["kind"].get<std::string>() << " (" << join(c["key"], ", ") << ") rows "
                << c["left"]["row"] << "/" << c["right"]["row"] << " located " << c["located"].get<std::string>()
                << '\n';
    }
    return 0;
  }
  print(out);
  return 0;
}

int run_transitive(const Globals& g, double min_risk) {
  const auto ctx = open_collection(g);
  json out = json::array();
  for (const auto& c : transitive_candidates(ctx->collection(), ctx->lookup(), ctx->dictionary(), min_risk)) {
    if (g.format == "text") {
      std::cout << c.endpoint_a << " <- " << c.bridge_b << " -> " << c.endpoint_c << "  risk " << c.score_ab.risk << " / "
                << c.score_bc.risk << '\n';
    }
    out.push_back(to_json(c));
  }
  if (g.format != "text") print({{"min_risk", min_risk}, {"candidates", out}});
  return 0;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui;
  std::string session_dir;
};

HttpService* g_service = nullptr;

int run_serve(const Globals& g, const ServeArgs& a) {
  SessionStoreOptions opts{g.manifest, source_of(g), std::nullopt, dictionary(g)};
  if (!a.session_dir.empty()) opts.session_dir = a.session_dir;
  SessionStore store(opts);
  if (!g.manifest.empty()) store.collection();
  HttpService service(store, a.ui.empty() ? std::nullopt : std::optional<fs::path>(a.ui));
  const int port = service.bind(a.host, a.port);
  std::cerr << "serving /v1 on http://" << a.host << ":" << port << '\n';
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_service) g_service->stop();
  });
  service.serve();
  g_service = nullptr;
  return 0;
}

struct SessionArgs {
  std::string session_dir = "sessions";
  std::string id;
  std::string qis;
  std::string step;
  std::string params = "{}";
  bool redact = true;
  std::string history;
  bool report = false;
};

SessionStore session_store(const Globals& g, const SessionArgs& a) {
  return SessionStore({g.manifest, source_of(g), fs::path(a.session_dir), dictionary(g)});
}

int run_session_replay(const Globals& g, const SessionArgs& a) {
  const auto history = load_history(a.history);
  if (history.empty()) throw Error(ErrorCode::kInvalidArgument, "empty history " + a.history);
  const auto& created = history.front().params;
  const std::string manifest = g.manifest.empty() ? created.value("collection", "") : g.manifest;
  auto source = source_of(g);
  const auto dict = dictionary(g);
  const auto ctx = CollectionContext::open(manifest, source, dict);
  const auto r = replay_history(history, *ctx);
  for (std::size_t i = 0; i < r.outputs.size(); ++i) {
    const bool ok = std::find(r.mismatches.begin(), r.mismatches.end(), i) == r.mismatches.end();
    json line{{"index", i}, {"digest_matches", ok}, {"output", r.outputs[i]}};
    std::cout << line.dump() << '\n';
  }
  if (a.report) {
    require_acknowledgment(a.redact, acknowledgment(g));
    std::cout << export_report(r.session, *ctx, a.redact, acknowledgment(g)).dump(2) << '\n';
  }
  if (!r.mismatches.empty()) {
    std::cerr << r.mismatches.size() << " step outputs differ from the recorded history\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"riskcal: disclosure-risk calibration for open-data collections"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--qi-dict", g.qi_dict, "QI dictionary JSON (default: RISKCAL_QI_DICT or built-in)");

  auto add_manifest = [&](CLI::App* cmd) {
    cmd->add_option("--manifest", g.manifest, "collection manifest (collection.jsonl)");
    cmd->add_option("--source,--fixtures", g.source, "catalog source: URL, cache dir or fixture dir");
  };
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", g.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  };
  auto add_ack = [&](CLI::App* cmd) {
    cmd->add_flag("--i-understand-risk", g.acknowledge, "print unredacted cell values");
  };

  HarvestArgs harvest_args;
  auto* harvest_cmd = app.add_subcommand("harvest", "harvest portal catalogs into a cache and build the manifest");
  harvest_cmd->add_option("--source", g.source, "portal discovery URL or fixture directory")->required();
  harvest_cmd->add_option("--cache-dir", harvest_args.cache_dir, "cache directory")->required();
  harvest_cmd->add_flag("--refresh", harvest_args.refresh, "re-fetch cached tables");
  harvest_cmd->add_option("--limit", harvest_args.limit, "row limit per table");
  harvest_cmd->add_option("--labels", harvest_args.labels, "label file to apply");
  harvest_cmd->add_option("--min-qi", harvest_args.min_qi, "minimum quasi-identifier count");

  CurateArgs curate_args;
  auto* curate_cmd = app.add_subcommand("curate", "label datasets (interactive unless labels are given)");
  add_manifest(curate_cmd);
  curate_cmd->add_option("--label", curate_args.labels, "ref=relevance[:granularity]");
  curate_cmd->add_option("--labels", curate_args.labels_file, "label file (JSONL)");
  curate_cmd->add_flag("--review-rejected", curate_args.review_rejected, "list tabular datasets without enough QIs");

  auto* funnel_cmd = app.add_subcommand("funnel", "print the curation funnel");
  add_manifest(funnel_cmd);
  add_format(funnel_cmd);

  ScanArgs scan_args;
  auto* scan_cmd = app.add_subcommand("scan", "k-anonymity summary and vulnerable entry points");
  scan_cmd->add_option("target", scan_args.target, "dataset ref or 'collection'")->required();
  scan_cmd->add_option("--keys", scan_args.keys, "comma-separated attributes or auto");
  scan_cmd->add_option("--threshold", scan_args.threshold, "report classes up to this size");
  scan_cmd->add_flag("--subsets", scan_args.subsets, "scan every subset of the key");
  add_manifest(scan_cmd);
  add_format(scan_cmd);
  add_ack(scan_cmd);

  ClusterArgs cluster_args;
  auto* cluster_cmd = app.add_subcommand("cluster", "cluster the collection by shared attributes");
  add_manifest(cluster_cmd);
  add_format(cluster_cmd);
  cluster_cmd->add_option("--qis", cluster_args.qis, "comma list or profile:NAME");
  cluster_cmd->add_option("--cut", cluster_args.cut, "distance cut");

  auto* pairs_cmd = app.add_subcommand("pairs", "rank the dataset pairs of a cluster");
  add_manifest(pairs_cmd);
  add_format(pairs_cmd);
  pairs_cmd->add_option("--cluster", cluster_args.cluster, "cluster id (default: top ranked)");
  pairs_cmd->add_option("--qis", cluster_args.qis, "comma list or profile:NAME");
  pairs_cmd->add_option("--cut", cluster_args.cut, "distance cut");

  JoinArgs join_args;
  auto* join_cmd = app.add_subcommand("join", "join two datasets and list disclosure candidates");
  add_manifest(join_cmd);
  add_format(join_cmd);
  add_ack(join_cmd);
  join_cmd->add_option("--left", join_args.left, "left dataset ref")->required();
  join_cmd->add_option("--right", join_args.right, "right dataset ref")->required();
  join_cmd->add_option("--key", join_args.key, "comma-separated key or auto");
  join_cmd->add_option("--row-cap", join_args.row_cap, "maximum materialized joined rows");

  double min_risk = 0.2;
  auto* transitive_cmd = app.add_subcommand("transitive", "find bridged pairs without shared QIs");
  add_manifest(transitive_cmd);
  add_format(transitive_cmd);
  transitive_cmd->add_option("--min-risk", min_risk, "minimum risk on both hops");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "serve the /v1 HTTP API");
  add_manifest(serve_cmd);
  serve_cmd->add_option("--host", serve_args.host, "bind address");
  serve_cmd->add_option("--port", serve_args.port, "port (0 picks one)");
  serve_cmd->add_option("--ui", serve_args.ui, "static UI bundle directory");
  serve_cmd->add_option("--session-dir", serve_args.session_dir, "directory for session histories");

  SessionArgs session_args;
  auto* session_cmd = app.add_subcommand("session", "defender sessions from the command line");
  session_cmd->require_subcommand(1);
  auto add_session = [&](CLI::App* cmd) {
    add_manifest(cmd);
    cmd->add_option("--session-dir", session_args.session_dir, "directory for session histories");
  };
  auto* s_create = session_cmd->add_subcommand("create", "start a session");
  add_session(s_create);
  auto* s_qis = session_cmd->add_subcommand("qis", "select quasi-identifiers");
  add_session(s_qis);
  s_qis->add_option("id", session_args.id)->required();
  s_qis->add_option("qis", session_args.qis, "comma list or profile:NAME")->required();
  auto* s_step = session_cmd->add_subcommand("step", "run a workflow step");
  add_session(s_step);
  s_step->add_option("id", session_args.id)->required();
  s_step->add_option("step", session_args.step, "cluster|pairs|join|suggest|parallel_sets|disclosures")->required();
  s_step->add_option("--params", session_args.params, "step parameters as a JSON object");
  auto* s_show = session_cmd->add_subcommand("show", "print session state");
  add_session(s_show);
  s_show->add_option("id", session_args.id)->required();
  auto* s_report = session_cmd->add_subcommand("report", "export the session report");
  add_session(s_report);
  add_ack(s_report);
  s_report->add_option("id", session_args.id)->required();
  s_report->add_option("--redact", session_args.redact, "mask cell values (true|false)");
  auto* s_replay = session_cmd->add_subcommand("replay", "re-run a recorded history and verify outputs");
  add_manifest(s_replay);
  add_ack(s_replay);
  s_replay->add_option("history", session_args.history, "history file")->required();
  s_replay->add_flag("--report", session_args.report, "also print the report");
  s_replay->add_option("--redact", session_args.redact, "mask cell values in the report (true|false)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*harvest_cmd) return run_harvest(g, harvest_args);
    if (*curate_cmd) return run_curate(g, curate_args);
    if (*funnel_cmd) return run_funnel(g);
    if (*scan_cmd) return run_scan(g, scan_args);
    if (*cluster_cmd) return run_cluster(g, cluster_args);
    if (*pairs_cmd) return run_pairs(g, cluster_args);
    if (*join_cmd) return run_join(g, join_args);
    if (*transitive_cmd) return run_transitive(g, min_risk);
    if (*serve_cmd) return run_serve(g, serve_args);
    if (*s_replay) return run_session_replay(g, session_args);
    auto store = session_store(g, session_args);
    if (*s_create) {
      print({{"session_id", store.create()}});
    } else if (*s_qis) {
      print(store.set_qis(session_args.id, parse_qis(session_args.qis)));
    } else if (*s_step) {
      json params;
      try {
        params = json::parse(session_args.params);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kInvalidArgument, std::string("--params is not JSON: ") + e.what());
      }
      print(store.run(session_args.id, parse_step(session_args.step), params));
    } else if (*s_show) {
      print(store.describe(session_args.id));
    } else if (*s_report) {
      print(store.report(session_args.id, session_args.redact, acknowledgment(g)));
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
