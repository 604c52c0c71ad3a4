#include "cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "bugchat/clock.hpp"
#include "bugchat/errors.hpp"
#include "bugchat/ingest/fixture.hpp"
#include "bugchat/ingest/trace.hpp"
#include "bugchat/match/matcher.hpp"
#include "bugchat/model/model_io.hpp"
#include "bugchat/predict/predictor.hpp"
#include "bugchat/service/http_server.hpp"
#include "bugchat/text/parser.hpp"

namespace bugchat::cli {
namespace fs = std::filesystem;
namespace {

constexpr std::size_t kMinPrefix = 8;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string fixed(double value) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << value;
  return s.str();
}

std::string short_fp(const model::Fingerprint& fp) { return fp.str().substr(0, 12); }

Json edge_json(const model::AppExecutionModel& m, model::EdgeId id) {
  const auto& e = m.edge(id);
  return {{"edge_id", id.value},
          {"source", e.source.str()},
          {"target", e.target.str()},
          {"action", std::string(model::to_string(e.action))},
          {"caption", predict::caption_edge(e)},
          {"weight", e.weight}};
}

struct Options {
  bool json = false;
  // ingest
  std::string traces, out;
  // match
  std::string model, text, state, mode = "screen";
  // predict
  std::string from, to;
  // serve
  std::string config;
  // fixture
  std::string spec;
};

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(o.traces)) throw UsageError("not a directory: " + o.traces);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.traces)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<ingest::TraceFile> traces;
  std::vector<std::string> failures;
  for (const auto& path : files) {
    try {
      traces.push_back(ingest::parse_trace(read_text(path)));
    } catch (const ValidationError& e) {
      auto where = e.event_sequence() ? " (event " + std::to_string(*e.event_sequence()) + ")" : "";
      failures.push_back(path.filename().string() + where + ": " + e.what());
    } catch (const Error& e) {
      failures.push_back(path.filename().string() + ": " + e.what());
    }
  }
  if (files.empty()) failures.push_back("no trace files in " + o.traces);

  std::shared_ptr<const model::AppExecutionModel> m;
  if (failures.empty()) {
    try {
      const auto& app = traces.front().app;
      m = ingest::build_model(traces, ingest::app_slug(app.name, app.version), utc_timestamp());
    } catch (const Error& e) {
      failures.push_back(e.what());
    }
  }
  if (!failures.empty()) {
    if (o.json) {
      out << Json{{"ok", false}, {"errors", failures}}.dump(2) << "\n";
    } else {
      for (const auto& f : failures) err << "error: " << f << "\n";
    }
    return kExitFailure;
  }
  model::save_model_file(*m, o.out);
  auto stats = model::model_stats(*m);
  if (o.json) {
    out << Json{{"ok", true},
                {"app_id", m->app_id()},
                {"traces", traces.size()},
                {"nodes", stats.node_count},
                {"edges", stats.edge_count},
                {"total_weight", stats.total_weight}}
               .dump(2)
        << "\n";
  } else {
    out << "nodes=" << stats.node_count << " edges=" << stats.edge_count
        << " weight=" << stats.total_weight << "\n";
  }
  return kExitOk;
}

int cmd_match(const Options& o, std::ostream& out) {
  if (o.mode != "screen" && o.mode != "edge") throw UsageError("--mode must be screen or edge");
  if (o.mode == "edge" && o.state.empty()) throw UsageError("--mode edge requires --state");
  auto m = model::load_model_file(o.model);
  text::SentenceParser parser;
  auto phrases = parser.parse_message(o.text);
  if (phrases.empty()) throw UsageError("--text is blank");
  const auto& phrase = phrases.front();
  match::Matcher matcher;

  Json j = {{"mode", o.mode}, {"sentence_type", std::string(text::to_string(phrase.sentence_type))}};
  std::ostringstream text;
  if (o.mode == "screen") {
    auto result = matcher.match_screen(*m, phrase);
    j["verdict"] = std::string(match::to_string(result.verdict));
    j["candidates"] = Json::array();
    text << "verdict: " << match::to_string(result.verdict) << "\n";
    int rank = 1;
    for (const auto& c : result.candidates) {
      const auto& s = m->screen(c.fingerprint);
      j["candidates"].push_back(
          {{"fingerprint", c.fingerprint.str()}, {"activity", s.activity}, {"score", c.score}});
      text << rank++ << ". " << short_fp(c.fingerprint) << " " << fixed(c.score) << " "
           << s.activity << "\n";
    }
  } else {
    auto state = resolve_fingerprint(*m, o.state);
    auto result = matcher.match_step(*m, phrase, state);
    j["verdict"] = std::string(match::to_string(result.verdict));
    j["state"] = state.str();
    j["candidates"] = Json::array();
    text << "verdict: " << match::to_string(result.verdict) << "\n";
    int rank = 1;
    for (const auto& c : result.candidates) {
      auto e = edge_json(*m, c.edge);
      e["score"] = c.score;
      e["hop"] = c.hop;
      e["inferred_prefix"] = c.inferred_prefix ? edge_json(*m, *c.inferred_prefix) : Json(nullptr);
      j["candidates"].push_back(e);
      text << rank++ << ". " << predict::caption_edge(m->edge(c.edge)) << " " << fixed(c.score)
           << " hop=" << c.hop << " -> " << short_fp(m->edge(c.edge).target) << "\n";
    }
  }
  out << (o.json ? j.dump(2) + "\n" : text.str());
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
  auto m = model::load_model_file(o.model);
  auto from = resolve_fingerprint(*m, o.from);
  auto to = resolve_fingerprint(*m, o.to);
  if (to == model::start_fingerprint()) throw UsageError("--to cannot be START");
  auto prediction = predict::predict_path(*m, from, to);
  if (!prediction) {
    if (o.json) {
      out << Json{{"from", from.str()}, {"to", to.str()}, {"path", nullptr}}.dump(2) << "\n";
    } else {
      out << "no path\n";
    }
    return kExitFailure;
  }
  Json j = {{"from", from.str()},
            {"to", to.str()},
            {"likelihood", prediction->likelihood.str()},
            {"likelihood_value", prediction->likelihood_value()},
            {"path", Json::array()},
            {"captions", Json::array()}};
  std::ostringstream text;
  text << "path: " << prediction->path.size() << " edges\n";
  int k = 1;
  for (auto id : prediction->path) {
    auto p = predict::edge_probability_exact(*m, id);
    auto e = edge_json(*m, id);
    e["probability"] = p.str();
    j["path"].push_back(e);
    text << k++ << ". " << predict::caption_edge(m->edge(id)) << "  p=" << p.str() << " ("
         << fixed(p.convert_to<double>()) << ")\n";
  }
  text << "likelihood: " << prediction->likelihood.str() << " ("
       << fixed(prediction->likelihood_value()) << ")\n";
  if (!prediction->batch.empty()) text << "suggestions:\n";
  for (const auto& s : prediction->batch) {
    j["captions"].push_back(s.caption);
    text << "  " << s.rank << ". " << s.caption << "\n";
  }
  out << (o.json ? j.dump(2) + "\n" : text.str());
  return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  auto m = model::load_model_file(o.model);
  auto stats = model::model_stats(*m);
  if (o.json) {
    Json histogram = Json::object();
    for (const auto& [w, n] : stats.weight_histogram) histogram[std::to_string(w)] = n;
    Json nondet = Json::array();
    for (const auto& fp : stats.nondeterministic_nodes) nondet.push_back(fp.str());
    out << Json{{"app_id", m->app_id()},
                {"nodes", stats.node_count},
                {"edges", stats.edge_count},
                {"total_weight", stats.total_weight},
                {"weight_histogram", histogram},
                {"nondeterministic_nodes", nondet}}
               .dump(2)
        << "\n";
    return kExitOk;
  }
  out << "app: " << m->app_name() << " " << m->app_version() << " (" << m->app_id() << ")\n";
  out << "nodes=" << stats.node_count << " edges=" << stats.edge_count
      << " weight=" << stats.total_weight << "\n";
  out << "weight histogram:";
  for (const auto& [w, n] : stats.weight_histogram) out << " " << w << "x" << n;
  out << "\nnondeterministic nodes: " << stats.nondeterministic_nodes.size() << "\n";
  for (const auto& fp : stats.nondeterministic_nodes) {
    out << "  " << short_fp(fp) << " " << m->screen(fp).activity << "\n";
  }
  return kExitOk;
}

int cmd_fixture(const Options& o, std::ostream& out) {
  auto spec = ingest::parse_fixture_spec(read_text(o.spec));
  auto traces = ingest::generate_fixture(spec);
  fs::create_directories(o.out);
  Json written = Json::array();
  for (const auto& t : traces) {
    auto path = fs::path(o.out) / (t.trace_id + ".json");
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    file << ingest::serialize_trace(t);
    if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());
    written.push_back(path.string());
  }
  if (o.json) {
    out << Json{{"traces", written}}.dump(2) << "\n";
  } else {
    out << "traces=" << traces.size() << " dir=" << o.out << "\n";
  }
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
  auto config = service::load_config(o.config);
  service::ApiService api(config);
  service::HttpServer server(api);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  int port = server.bind(config.host, config.port);
  if (o.json) {
    out << Json{{"host", config.host}, {"port", port}, {"asset_dir", config.asset_dir.string()}}.dump()
        << std::endl;
  } else {
    out << "listening on " << config.host << ":" << port << std::endl;
  }
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  // Wake the waiter if the server stopped by itself.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

}  // namespace

model::Fingerprint resolve_fingerprint(const model::AppExecutionModel& m, const std::string& text) {
  if (text == "START") return model::start_fingerprint();
  if (text.size() < kMinPrefix) {
    throw UsageError("fingerprint prefix '" + text + "' is shorter than 8 characters");
  }
  std::vector<model::Fingerprint> hits;
  for (const auto& [fp, screen] : m.nodes()) {
    if (fp != model::start_fingerprint() && fp.str().rfind(text, 0) == 0) hits.push_back(fp);
  }
  if (hits.empty()) throw UsageError("unknown screen " + text);
  if (hits.size() > 1) throw UsageError("ambiguous fingerprint prefix " + text);
  return hits.front();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Bug report assistant tooling", "bugchat"};
  app.require_subcommand(1);
  app.add_flag("--json", o.json, "Machine-readable output");

  auto* ingest = app.add_subcommand("ingest", "Build a model from a directory of traces");
  ingest->add_option("--traces", o.traces, "Trace directory")->required();
  ingest->add_option("--out", o.out, "Model file to write")->required();

  auto* match = app.add_subcommand("match", "Match an utterance against a model");
  match->add_option("--model", o.model)->required();
  match->add_option("--text", o.text)->required();
  match->add_option("--state", o.state, "Current screen (edge mode)");
  match->add_option("--mode", o.mode, "screen or edge");

  auto* predict = app.add_subcommand("predict", "Most likely path between two screens");
  predict->add_option("--model", o.model)->required();
  predict->add_option("--from", o.from)->required();
  predict->add_option("--to", o.to)->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", o.config)->required();

  auto* fixture = app.add_subcommand("fixture", "Generate traces for a fixture spec");
  fixture->add_option("--spec", o.spec)->required();
  fixture->add_option("--out", o.out)->required();

  auto* stats = app.add_subcommand("stats", "Model statistics");
  stats->add_option("--model", o.model)->required();

  for (auto* sub : {ingest, match, predict, serve, fixture, stats}) {
    sub->add_flag("--json", o.json, "Machine-readable output");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(o, out, err);
    if (*match) return cmd_match(o, out);
    if (*predict) return cmd_predict(o, out);
    if (*serve) return cmd_serve(o, out);
    if (*fixture) return cmd_fixture(o, out);
    if (*stats) return cmd_stats(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace bugchat::cli
