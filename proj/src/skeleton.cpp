#include "cyclestat/skeleton.hpp"

#include "cyclestat/error.hpp"
#include "cyclestat/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

namespace cyclestat {

using nlohmann::json;

SkeletonModel SkeletonModel::body25() {
  SkeletonModel model;
  model.joint_count = 25;
  model.neck_index = 1;
  model.midhip_index = 8;
  model.joint_names = {"Nose",     "Neck",      "RShoulder", "RElbow",   "RWrist",
                       "LShoulder", "LElbow",    "LWrist",    "MidHip",   "RHip",
                       "RKnee",     "RAnkle",    "LHip",      "LKnee",    "LAnkle",
                       "REye",      "LEye",      "REar",      "LEar",     "LBigToe",
                       "LSmallToe", "LHeel",     "RBigToe",   "RSmallToe", "RHeel"};
  return model;
}

void SkeletonModel::validate() const {
  if (joint_count < 2) throw Error(ErrorCode::InvalidModel, "joint_count must be >= 2");
  if (neck_index == midhip_index)
    throw Error(ErrorCode::InvalidModel, "neck and mid-hip must be distinct joints");
  if (neck_index < 0 || midhip_index < 0 || neck_index >= joint_count ||
      midhip_index >= joint_count)
    throw Error(ErrorCode::InvalidModel, "neck/mid-hip index out of range");
  if (!joint_names.empty() && static_cast<int>(joint_names.size()) != joint_count)
    throw Error(ErrorCode::InvalidModel, "joint_names size differs from joint_count");
}

namespace {

std::optional<SkeletonPose> read_person(const json& person, const SkeletonModel& model) {
  const int n = model.joint_count;
  const json* keypoints = nullptr;
  int dims = 0;
  if (auto it = person.find("pose_keypoints_2d");
      it != person.end() && it->is_array() && !it->empty()) {
    keypoints = &*it;
    dims = 2;
  } else if (auto it3 = person.find("pose_keypoints_3d");
             it3 != person.end() && it3->is_array() && !it3->empty()) {
    keypoints = &*it3;
    dims = 3;
  }
  if (keypoints == nullptr)
    throw Error(ErrorCode::MalformedKeypoints, "person has no pose keypoints");

  const std::size_t stride = static_cast<std::size_t>(dims) + 1;
  if (keypoints->size() != stride * static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::MalformedKeypoints,
                "expected " + std::to_string(stride * n) + " keypoint values, got " +
                    std::to_string(keypoints->size()));
  }

  SkeletonPose pose;
  pose.coords.resize(n, dims);
  pose.confidence.resize(n);
  for (int j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < stride; ++k) {
      const json& v = (*keypoints)[stride * j + k];
      if (!v.is_number()) throw Error(ErrorCode::MalformedKeypoints, "non-numeric keypoint value");
      const double value = v.get<double>();
      if (k < static_cast<std::size_t>(dims)) {
        pose.coords(j, static_cast<Eigen::Index>(k)) = value;
      } else {
        pose.confidence(j) = std::clamp(value, 0.0, 1.0);
      }
    }
  }
  return pose;
}

SkeletonPose parse_frame_value(const json& doc, const SkeletonModel& model) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidJson, "frame is not a JSON object");
  auto it = doc.find("people");
  if (it == doc.end() || !it->is_array())
    throw Error(ErrorCode::InvalidJson, "frame has no \"people\" array");
  if (it->empty()) throw Error(ErrorCode::EmptyFrame, "no people detected");

  std::optional<SkeletonPose> best;
  double best_score = -1.0;
  for (const json& person : *it) {
    if (!person.is_object()) throw Error(ErrorCode::MalformedKeypoints, "person is not an object");
    auto pose = read_person(person, model);
    const double score = pose->confidence.sum();
    if (score > best_score) {
      best_score = score;
      best = std::move(pose);
    }
  }
  if (best_score <= 0.0) throw Error(ErrorCode::AllJointsMissing, "every joint has confidence 0");
  return *best;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidJson, e.what());
  }
}

bool is_gap_error(ErrorCode code) {
  return code == ErrorCode::EmptyFrame || code == ErrorCode::AllJointsMissing;
}

// Joints with confidence 0 take the coordinates last seen for that joint;
// joints never seen so far sit on the mid-hip.
void carry_forward_missing_joints(std::vector<std::optional<SkeletonPose>>& frames,
                                  const SkeletonModel& model) {
  std::vector<std::optional<Eigen::RowVectorXd>> last_seen(model.joint_count);
  for (auto& frame : frames) {
    if (!frame) continue;
    SkeletonPose& pose = *frame;
    std::vector<int> unseen;
    for (int j = 0; j < model.joint_count; ++j) {
      if (pose.confidence(j) > 0.0) {
        last_seen[j] = pose.coords.row(j);
      } else if (last_seen[j]) {
        pose.coords.row(j) = *last_seen[j];
      } else {
        unseen.push_back(j);
      }
    }
    const bool midhip_known = pose.confidence(model.midhip_index) > 0.0 ||
                              last_seen[model.midhip_index].has_value();
    if (midhip_known) {
      const Eigen::RowVectorXd midhip = pose.coords.row(model.midhip_index);
      for (int j : unseen) pose.coords.row(j) = midhip;
    }
  }
}

PoseSequence assemble(std::vector<std::optional<SkeletonPose>> frames, const SkeletonModel& model) {
  const int count = static_cast<int>(frames.size());
  std::vector<int> valid;
  for (int i = 0; i < count; ++i) {
    if (frames[i]) valid.push_back(i);
  }
  if (valid.empty()) throw Error(ErrorCode::NoFrames, "no frame with a detected person");

  const int dims = frames[valid.front()]->dims();
  for (int i : valid) {
    if (frames[i]->dims() != dims)
      throw Error(ErrorCode::MalformedKeypoints, "frames mix 2-D and 3-D keypoints");
  }

  carry_forward_missing_joints(frames, model);

  // Undetected runs: interpolate interior gaps, hold the nearest frame at the ends.
  int i = 0;
  while (i < count) {
    if (frames[i]) {
      ++i;
      continue;
    }
    int end = i;
    while (end < count && !frames[end]) ++end;
    const int gap = end - i;
    if (gap > kMaxGapFrames) {
      throw Error(ErrorCode::GapTooLong, "frames " + std::to_string(i) + ".." +
                                             std::to_string(end - 1) + " have no detection");
    }
    const int before = i - 1;
    const int after = end < count ? end : -1;
    for (int k = i; k < end; ++k) {
      SkeletonPose filled;
      if (before >= 0 && after >= 0) {
        const double w = static_cast<double>(k - before) / static_cast<double>(after - before);
        filled.coords = (1.0 - w) * frames[before]->coords + w * frames[after]->coords;
      } else {
        filled.coords = frames[before >= 0 ? before : after]->coords;
      }
      filled.confidence = Eigen::VectorXd::Zero(model.joint_count);
      filled.interpolated = true;
      frames[k] = std::move(filled);
    }
    i = end;
  }

  PoseSequence seq;
  seq.model = model;
  seq.poses.reserve(frames.size());
  for (int k = 0; k < count; ++k) {
    frames[k]->frame_index = k;
    seq.poses.push_back(std::move(*frames[k]));
  }
  return seq;
}

PoseSequence load_from_text(const std::string& content, const SkeletonModel& model) {
  model.validate();

  // A whole-document parse covers one frame or an array of frames; anything
  // else is read as JSON lines.
  std::vector<json> docs;
  json whole = json::parse(content, nullptr, /*allow_exceptions=*/false);
  if (!whole.is_discarded() && whole.is_array()) {
    docs.assign(whole.begin(), whole.end());
  } else if (!whole.is_discarded() && whole.is_object()) {
    docs.push_back(std::move(whole));
  } else {
    std::istringstream lines(content);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      docs.push_back(parse_json(line));
    }
  }

  std::vector<std::optional<SkeletonPose>> frames(docs.size());
  parallel_for(docs.size(), [&](std::size_t k) {
    try {
      frames[k] = parse_frame_value(docs[k], model);
    } catch (const Error& e) {
      if (!is_gap_error(e.code())) throw;
    }
  });
  return assemble(std::move(frames), model);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NoFrames, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

SkeletonPose parse_openpose_frame(std::string_view frame_text, const SkeletonModel& model) {
  model.validate();
  return parse_frame_value(parse_json(frame_text), model);
}

PoseSequence load_sequence(const std::filesystem::path& source, const SkeletonModel& model) {
  namespace fs = std::filesystem;
  model.validate();
  if (!fs::is_directory(source)) return load_from_text(read_file(source), model);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(source)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (files.empty()) throw Error(ErrorCode::NoFrames, "no .json frames in " + source.string());

  std::vector<std::optional<SkeletonPose>> frames(files.size());
  parallel_for(files.size(), [&](std::size_t k) {
    try {
      frames[k] = parse_openpose_frame(read_file(files[k]), model);
    } catch (const Error& e) {
      if (!is_gap_error(e.code())) throw;
    }
  });
  return assemble(std::move(frames), model);
}

PoseSequence load_sequence(std::istream& in, const SkeletonModel& model) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_from_text(buffer.str(), model);
}

SkeletonPose normalize_pose(const SkeletonPose& pose, const SkeletonModel& model) {
  if (pose.joint_count() != model.joint_count)
    throw Error(ErrorCode::DimensionMismatch, "pose joint count differs from the model");
  const Eigen::RowVectorXd midhip = pose.coords.row(model.midhip_index);
  const double torso = (pose.coords.row(model.neck_index) - midhip).norm();
  if (!(torso >= 1e-9)) {
    throw Error(ErrorCode::DegenerateTorso,
                "neck/mid-hip distance is zero in frame " + std::to_string(pose.frame_index));
  }
  SkeletonPose out = pose;
  out.coords = (pose.coords.rowwise() - midhip) / torso;
  return out;
}

PoseSequence normalize_sequence(const PoseSequence& seq) {
  PoseSequence out;
  out.model = seq.model;
  out.normalized = true;
  out.poses.resize(seq.poses.size());
  parallel_for(seq.poses.size(),
               [&](std::size_t k) { out.poses[k] = normalize_pose(seq.poses[k], seq.model); });
  return out;
}

SkeletonPose mean_center(const SkeletonPose& pose) {
  SkeletonPose out = pose;
  if (pose.coords.rows() == 0) return out;
  const Eigen::RowVectorXd centroid = pose.coords.colwise().mean();
  out.coords = pose.coords.rowwise() - centroid;
  // second pass removes the rounding left by a large offset
  const Eigen::RowVectorXd residual = out.coords.colwise().mean();
  out.coords.rowwise() -= residual;
  return out;
}

std::string to_openpose_json(const SkeletonPose& pose) {
  const int dims = pose.dims();
  json::array_t keypoints;
  keypoints.reserve(static_cast<std::size_t>(pose.joint_count()) * (dims + 1));
  for (int j = 0; j < pose.joint_count(); ++j) {
    for (int k = 0; k < dims; ++k) keypoints.emplace_back(pose.coords(j, k));
    keypoints.emplace_back(pose.confidence(j));
  }

  nlohmann::ordered_json person;
  person["person_id"] = {-1};
  person["pose_keypoints_2d"] = dims == 2 ? json(keypoints) : json::array();
  person["face_keypoints_2d"] = json::array();
  person["hand_left_keypoints_2d"] = json::array();
  person["hand_right_keypoints_2d"] = json::array();
  person["pose_keypoints_3d"] = dims == 3 ? json(keypoints) : json::array();
  person["face_keypoints_3d"] = json::array();
  person["hand_left_keypoints_3d"] = json::array();
  person["hand_right_keypoints_3d"] = json::array();

  nlohmann::ordered_json doc;
  doc["version"] = 1.3;
  doc["people"] = nlohmann::ordered_json::array({person});
  return doc.dump();
}

}  // namespace cyclestat
