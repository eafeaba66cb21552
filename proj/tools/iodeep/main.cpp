#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "iodeep/error.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

int report(const iodeep::Error& e, bool quiet) {
  if (quiet) {
    std::cerr << "iodeep: " << iodeep::errc_name(e.code());
    if (!e.stage().empty()) std::cerr << " at " << e.stage();
    std::cerr << ": " << e.what() << '\n';
  } else {
    nlohmann::json j{{"error", std::string(iodeep::errc_name(e.code()))}, {"message", e.what()}};
    if (!e.stage().empty()) j["stage"] = e.stage();
    std::cerr << j.dump() << '\n';
  }
  switch (e.code()) {
    case iodeep::Errc::NoMatchingNetwork: return iodeep::cli::kNoMatchingNetwork;
    case iodeep::Errc::ConnectionFailure: return iodeep::cli::kConnection;
    default: return iodeep::cli::kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace iodeep::cli;

  CLI::App app{"IODeep: DNN-carrying DICOM instances, a mini PACS and ROI prediction"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "iodeep 0.1.0");

  Output output;
  std::string log_level = "warn";
  app.add_flag("-q,--quiet", output.quiet, "Human-readable output instead of JSON");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  const std::string default_bind = env_or("IODEEP_BIND", "127.0.0.1:8042");
  std::string server = env_or("IODEEP_SERVER", "http://" + default_bind);
  auto add_server = [&](CLI::App* cmd) {
    cmd->add_option("--server", server, "Service URL (IODEEP_SERVER, else http://$IODEEP_BIND)")->capture_default_str();
  };

  PackArgs pack;
  auto* pack_cmd = app.add_subcommand("pack", "Pack an architecture document and weights into an IODeep file");
  pack_cmd->add_option("--arch", pack.architecture, "Architecture JSON document")->required()->check(CLI::ExistingFile);
  pack_cmd->add_option("--weights", pack.weights, "Weights payload (.iodw)")->required()->check(CLI::ExistingFile);
  pack_cmd->add_option("--name", pack.name, "DnnName")->required();
  pack_cmd->add_option("--modality", pack.modality, "Modality the network serves")->required();
  pack_cmd->add_option("--body-part", pack.body_part, "BodyPartExamined the network serves")->required();
  pack_cmd->add_option("--samples", pack.samples, "SamplesPerPixel")->capture_default_str();
  pack_cmd->add_option("--photometric", pack.photometric, "PhotometricInterpretation")->capture_default_str();
  pack_cmd->add_option("--uid", pack.uid, "DnnUID (generated when omitted)");
  pack_cmd->add_option("-o,--out", pack.out, "Output file (default <DnnUID>.dcm)");
  pack_cmd->add_option("--weights-mode", pack.weights_mode, "store, inline or path")
      ->check(CLI::IsMember({"store", "inline", "path"}))
      ->capture_default_str();

  std::string store = env_or("IODEEP_STORE", "./iodeep-store");
  std::string bind = default_bind;
  unsigned threads = 8;
  auto* serve_cmd = app.add_subcommand("serve", "Run the PACS service");
  serve_cmd->add_option("--store", store, "Store directory (IODEEP_STORE)")->capture_default_str();
  serve_cmd->add_option("--bind", bind, "host:port (IODEEP_BIND); port 0 picks a free one")->capture_default_str();
  serve_cmd->add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 256u));

  std::vector<std::string> files;
  auto* import_cmd = app.add_subcommand("import", "Upload DICOM files, directories and weights payloads");
  add_server(import_cmd);
  import_cmd->add_option("files", files, "Files or directories")->required();

  std::string level = "study";
  std::vector<std::string> filters;
  auto* ls_cmd = app.add_subcommand("ls", "Query the service");
  add_server(ls_cmd);
  ls_cmd->add_option("--level", level, "study, series or instance")->capture_default_str();
  ls_cmd->add_option("-f,--filter", filters, "KEY=VALUE exact-match filter on an indexed attribute");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Propose ROIs for a slice");
  add_server(predict_cmd);
  predict_cmd->add_option("--slice", predict.slice, "SOPInstanceUID of the slice")->required();
  predict_cmd->add_option("-o,--out", predict.out, "Write the proposals here");

  SubmitArgs submit;
  auto* submit_cmd = app.add_subcommand("submit", "Validate proposals and store the RT Structure Set");
  add_server(submit_cmd);
  submit_cmd->add_option("--from", submit.from, "Prediction written by `predict --out`")->check(CLI::ExistingFile);
  submit_cmd->add_option("--session", submit.session, "Session id (default: from --from)");
  submit_cmd->add_option("--reviewer", submit.reviewer, "ReviewerName, e.g. DOE^JANE")->required();
  auto* all = submit_cmd->add_flag("--accept-all", submit.accept_all, "Accept every proposal");
  submit_cmd->add_option("--decisions", submit.decisions, "accepted/rejected per proposal, in order")
      ->delimiter(',')
      ->excludes(all);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic Gaussian-blob slices");
  synth_cmd->add_option("-o,--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--count", synth.count, "Number of slices")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Seed; equal seeds give equal series")->capture_default_str();
  synth_cmd->add_option("--modality", synth.modality)->capture_default_str();
  synth_cmd->add_option("--body-part", synth.body_part)->capture_default_str();
  synth_cmd->add_option("--study-description", synth.study_description)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("iodeep"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  predict.server = server;
  submit.server = server;

  try {
    if (*pack_cmd) return cmd_pack(pack, output);
    if (*serve_cmd) {
      if (log_level == "warn") spdlog::set_level(spdlog::level::info);
      return cmd_serve(store, bind, threads);
    }
    if (*import_cmd) return cmd_import(server, files, output);
    if (*ls_cmd) return cmd_ls(server, level, filters, output);
    if (*predict_cmd) return cmd_predict(predict, output);
    if (*submit_cmd) return cmd_submit(submit, output);
    if (*synth_cmd) return cmd_synth(synth, output);
  } catch (const iodeep::Error& e) {
    return report(e, output.quiet);
  } catch (const std::exception& e) {
    std::cerr << "iodeep: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
