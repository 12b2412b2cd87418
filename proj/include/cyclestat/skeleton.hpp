#pragma once

// Skeleton keypoint streams: OpenPose JSON parsing, sequence assembly and
// scale/translation normalization.

#include <Eigen/Core>

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace cyclestat {

struct SkeletonModel {
  int joint_count = 0;
  int neck_index = 0;
  int midhip_index = 0;
  std::vector<std::string> joint_names;

  /// OpenPose BODY_25: 25 joints, neck = 1, mid-hip = 8.
  static SkeletonModel body25();

  /// Throws InvalidModel when the index/count invariants do not hold.
  void validate() const;
};

struct SkeletonPose {
  Eigen::MatrixXd coords;      // n x d, d in {2, 3}
  Eigen::VectorXd confidence;  // n, each in [0, 1]
  int frame_index = 0;
  bool interpolated = false;   // filled in for a frame with no detection

  int joint_count() const { return static_cast<int>(coords.rows()); }
  int dims() const { return static_cast<int>(coords.cols()); }
};

struct PoseSequence {
  std::vector<SkeletonPose> poses;
  SkeletonModel model;
  bool normalized = false;

  std::size_t size() const { return poses.size(); }
};

/// Longest run of consecutive undetected frames that load_sequence will fill.
inline constexpr int kMaxGapFrames = 5;

/// Parses one OpenPose frame document. When several people are present the
/// one with the largest summed confidence wins; ties go to the lowest index.
/// Coordinates are copied verbatim.
SkeletonPose parse_openpose_frame(std::string_view frame_text, const SkeletonModel& model);

/// Loads a directory of per-frame JSON files (lexicographic filename order) or
/// a JSON-lines file. Undetected frames are linearly interpolated when the gap
/// is at most kMaxGapFrames long; occluded joints (confidence 0) are carried
/// forward from the last frame that saw them.
PoseSequence load_sequence(const std::filesystem::path& source, const SkeletonModel& model);

/// Same as the file overload; each non-blank line of `in` is one frame.
PoseSequence load_sequence(std::istream& in, const SkeletonModel& model);

/// Translates mid-hip to the origin and scales to unit neck/mid-hip distance.
SkeletonPose normalize_pose(const SkeletonPose& pose, const SkeletonModel& model);

PoseSequence normalize_sequence(const PoseSequence& seq);

/// Subtracts the joint centroid from every row.
SkeletonPose mean_center(const SkeletonPose& pose);

/// Serializes a pose as an OpenPose frame document with a single person.
std::string to_openpose_json(const SkeletonPose& pose);

}  // namespace cyclestat
