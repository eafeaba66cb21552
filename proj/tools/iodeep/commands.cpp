#include "commands.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "iodeep/dicom/file.hpp"
#include "iodeep/dicom/tags.hpp"
#include "iodeep/dicom/uid.hpp"
#include "iodeep/error.hpp"
#include "iodeep/iod/iodeep.hpp"
#include "iodeep/nn/model.hpp"
#include "iodeep/pacs/client.hpp"
#include "iodeep/pacs/server.hpp"
#include "iodeep/pacs/store.hpp"
#include "iodeep/pacs/wire.hpp"
#include "iodeep/synthetic.hpp"
#include "iodeep/workflow.hpp"

namespace iodeep::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
  const auto bytes = dicom::read_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void emit(const Output& out, const json& machine, const std::string& human) {
  if (out.quiet) {
    if (!human.empty()) std::cout << human << '\n';
  } else {
    std::cout << machine.dump(2) << '\n';
  }
}

std::vector<fs::path> expand(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".dcm" || ext == ".iodw")) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

}  // namespace

int cmd_pack(const PackArgs& a, const Output& out) {
  const auto architecture = read_text(a.architecture);
  auto net = nn::parse_architecture(architecture);
  const auto payload = dicom::read_bytes(a.weights);
  // Binding the weights proves the pair is consistent before anything is written.
  (void)nn::create_model(net, nn::decode_weights(payload));

  const auto uid = a.uid.empty() ? dicom::generate_uid() : a.uid;
  const fs::path file = a.out.empty() ? fs::path(uid + ".dcm") : fs::path(a.out);
  std::string locator;
  fs::path sidecar;
  if (a.weights_mode == "store") {
    locator = pacs::weights_locator(uid);
    sidecar = file.parent_path() / (uid + ".iodw");
  } else if (a.weights_mode == "inline") {
    locator = nn::inline_weights_uri(payload);
  } else if (a.weights_mode == "path") {
    locator = "file://" + fs::absolute(a.weights).lexically_normal().string();
  } else {
    throw Error(Errc::InvalidRequest, "--weights-mode must be store, inline or path");
  }

  const auto desc = iod::make_descriptor(uid, a.name, architecture, locator, a.modality, a.body_part, a.samples,
                                         a.photometric);
  const auto body = iod::build_iodeep(desc);
  if (!sidecar.empty()) dicom::write_bytes_atomic(sidecar, payload);
  dicom::write_file(dicom::DicomFile::from_body(body), file);

  json result{{"DnnUID", uid}, {"file", file.string()}, {"DnnWeights", locator.size() > 120 ? locator.substr(0, 120) + "..." : locator}};
  if (!sidecar.empty()) result["weights_file"] = sidecar.string();
  emit(out, result, uid);
  return kOk;
}

int cmd_serve(const std::string& store_dir, const std::string& bind, unsigned threads) {
  // Handle SIGINT/SIGTERM on a dedicated thread so shutdown runs outside
  // signal context.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  pacs::ServerOptions options = pacs::parse_bind(bind);
  options.worker_threads = threads;
  pacs::PacsStore store(store_dir);
  workflow::WorkflowService workflow(store);
  pacs::HttpServer server(store, workflow, options);
  const int port = server.bind();
  std::cout << json{{"store", store_dir}, {"host", options.host}, {"port", port}}.dump() << std::endl;

  std::thread waiter([&] {
    int received = 0;
    sigwait(&signals, &received);
    spdlog::info("signal {} received, shutting down", received);
    server.stop();
  });
  server.listen();
  // listen() also returns when the socket fails; wake the waiter then.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

int cmd_import(const std::string& server, const std::vector<std::string>& inputs, const Output& out) {
  pacs::PacsClient client(server);
  json results = json::array();
  std::string human;
  for (const auto& path : expand(inputs)) {
    const auto bytes = dicom::read_bytes(path);
    if (path.extension() == ".iodw") {
      const auto uid = path.stem().string();
      if (!dicom::is_valid_uid(uid))
        throw Error(Errc::InvalidRequest, path.string() + ": weights files are named <DnnUID>.iodw");
      client.store_weights(uid, bytes);
      results.push_back({{"file", path.string()}, {"DnnUID", uid}});
      human += "weights " + uid + "\n";
      continue;
    }
    const auto file = dicom::decode_file(bytes);
    if (iod::is_iodeep(file.body)) {
      const auto desc = iod::parse_iodeep(file.body);
      if (const auto uid = pacs::weights_locator_uid(desc.dnn_weights)) {
        const auto sidecar = path.parent_path() / (*uid + ".iodw");
        if (fs::is_regular_file(sidecar)) {
          client.store_weights(*uid, dicom::read_bytes(sidecar));
          human += "weights " + *uid + "\n";
        } else {
          spdlog::warn("{} points at stored weights but {} is missing", path.string(), sidecar.string());
        }
      }
    }
    const auto uid = client.store_instance(bytes);
    results.push_back({{"file", path.string()}, {"SOPInstanceUID", uid}});
    human += "instance " + uid + "\n";
  }
  if (!human.empty()) human.pop_back();
  emit(out, results, human);
  return kOk;
}

int cmd_ls(const std::string& server, const std::string& level_name, const std::vector<std::string>& filters,
           const Output& out) {
  const auto level = pacs::level_from_name(level_name);
  if (!level) throw Error(Errc::InvalidRequest, "--level must be study, series or instance");
  pacs::TagMap map;
  for (const auto& f : filters) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw Error(Errc::InvalidRequest, "filter '" + f + "' is not KEY=VALUE");
    map[f.substr(0, eq)] = f.substr(eq + 1);
  }
  pacs::PacsClient client(server);
  const auto rows = client.query(*level, map);
  json machine = json::array();
  std::string human;
  for (const auto& s : rows) {
    machine.push_back(s.attributes);
    auto attr = [&](const char* k) {
      auto it = s.attributes.find(k);
      return it == s.attributes.end() ? std::string{} : it->second;
    };
    human += s.uid;
    switch (*level) {
      case pacs::Level::Study:
        human += "  " + attr("PatientID") + "  " + attr("StudyDescription") + "  (" +
                 attr("NumberOfStudyRelatedSeries") + " series, " + attr("NumberOfStudyRelatedInstances") +
                 " instances)";
        break;
      case pacs::Level::Series:
        human += "  " + attr("Modality") + "  " + attr("BodyPartExamined") + "  (" +
                 attr("NumberOfSeriesRelatedInstances") + " instances)";
        break;
      case pacs::Level::Instance:
        human += "  " + attr("Modality") + "  " + attr("SOPClassUID");
        if (!attr("DnnUID").empty()) human += "  DNN " + attr("DnnName");
        break;
    }
    human += '\n';
  }
  if (!human.empty()) human.pop_back();
  emit(out, machine, human);
  return kOk;
}

int cmd_predict(const PredictArgs& a, const Output& out) {
  pacs::PacsClient client(a.server);
  const auto result = client.predict(a.slice);
  const auto text = json::parse(pacs::wire::prediction_to_json(result)).dump(2) + "\n";
  if (!a.out.empty()) {
    dicom::write_bytes_atomic(a.out, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
  if (out.quiet) {
    std::cout << result.proposals.size() << " proposal(s) from " << result.dnn_name << " (" << result.dnn_uid
              << "), session " << result.session_id << '\n';
    for (const auto& p : result.proposals) {
      std::cout << "  " << p.id << "  " << p.polyline.label << "  " << p.polyline.points.size()
                << " points  confidence " << p.confidence << '\n';
    }
  } else if (a.out.empty()) {
    std::cout << text;
  } else {
    std::cout << json{{"session", result.session_id}, {"proposals", result.proposals.size()}, {"out", a.out}}.dump(2)
              << '\n';
  }
  return kOk;
}

int cmd_submit(const SubmitArgs& a, const Output& out) {
  pacs::wire::ValidationRequest request;
  request.session = a.session;
  request.reviewer = a.reviewer;
  std::size_t count = 0;
  if (!a.from.empty()) {
    const auto prediction = pacs::wire::prediction_from_json(read_text(a.from));
    if (request.session.empty()) request.session = prediction.session_id;
    count = prediction.proposals.size();
  }
  if (request.session.empty()) throw Error(Errc::InvalidRequest, "give --session or --from");
  if (a.accept_all) {
    if (a.from.empty()) throw Error(Errc::InvalidRequest, "--accept-all needs --from to know the proposals");
    request.decisions.assign(count, rt::Decision::Accepted);
  } else {
    for (const auto& d : a.decisions) {
      if (d == "accepted" || d == "accept" || d == "a") {
        request.decisions.push_back(rt::Decision::Accepted);
      } else if (d == "rejected" || d == "reject" || d == "r") {
        request.decisions.push_back(rt::Decision::Rejected);
      } else {
        throw Error(Errc::InvalidRequest, "decision '" + d + "' is neither accepted nor rejected");
      }
    }
  }
  pacs::PacsClient client(a.server);
  const auto uid = client.submit(request);
  emit(out, {{"SOPInstanceUID", uid}}, uid);
  return kOk;
}

int cmd_synth(const SynthArgs& a, const Output& out) {
  synthetic::SeriesOptions options;
  options.modality = a.modality;
  options.body_part = a.body_part;
  options.study_description = a.study_description;
  const auto series = synthetic::generate_series(a.seed, a.count, options);
  fs::create_directories(a.out);
  json files = json::array();
  std::string human;
  for (std::size_t i = 0; i < series.images.size(); ++i) {
    const auto& image = series.images[i];
    const auto uid = image.text_or_empty(dicom::tags::SOPInstanceUID);
    const auto path = fs::path(a.out) / (uid + ".dcm");
    dicom::write_file(dicom::DicomFile::from_body(image), path);
    files.push_back({{"file", path.string()}, {"SOPInstanceUID", uid}, {"blobs", series.slices[i].blobs.size()}});
    human += path.string() + "  " + std::to_string(series.slices[i].blobs.size()) + " blob(s)\n";
  }
  if (!human.empty()) human.pop_back();
  emit(out, files, human);
  return kOk;
}

}  // namespace iodeep::cli
