// core/src/corpus.cc
//
// Copyright 2026  audkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aud/corpus.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace aud {

namespace {

constexpr char kMagic[4] = {'A', 'U', 'D', 'F'};
constexpr std::uint32_t kFeatVersion = 1;
constexpr double kVarianceFloor = 1e-8;

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

int ParseInt(const std::string &s, const std::string &path, int lineno) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw IoError(path + ":" + std::to_string(lineno) +
                  ": expected integer, got '" + s + "'");
  }
}

class BinaryReader {
 public:
  BinaryReader(const std::string &path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open feature archive: " + path);
  }

  std::size_t offset() const { return offset_; }

  void Raw(void *dst, std::size_t n, const char *what) {
    in_.read(static_cast<char *>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw IoError(path_ + ": truncated archive reading " + what +
                    " at byte offset " + std::to_string(offset_));
    }
    offset_ += n;
  }

  std::uint32_t U32(const char *what) {
    unsigned char b[4];
    Raw(b, 4, what);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
           (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t offset_ = 0;
};

void PutU32(std::ostream &out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char *>(b), 4);
}

}  // namespace

int FeatureSet::Dim() const {
  return utterances.empty() ? 0 : static_cast<int>(utterances[0].features.cols());
}

std::size_t FeatureSet::TotalFrames() const {
  std::size_t n = 0;
  for (const auto &u : utterances) n += static_cast<std::size_t>(u.features.rows());
  return n;
}

const FeatureSet::Utterance *FeatureSet::Find(const std::string &utt_id) const {
  for (const auto &u : utterances)
    if (u.id == utt_id) return &u;
  return nullptr;
}

std::string FeatureSet::SideOf(const std::string &utt_id) const {
  auto it = side_of.find(utt_id);
  return it == side_of.end() ? utt_id : it->second;
}

void FeatureSet::Validate() const {
  if (frame_period_s <= 0.0)
    throw ValidationError("frame_period_s must be > 0");
  std::set<std::string> seen;
  for (const auto &u : utterances) {
    if (!seen.insert(u.id).second)
      throw ValidationError("duplicate utterance id: " + u.id);
    if (u.features.rows() < 1)
      throw ValidationError("utterance has no frames: " + u.id);
    if (u.features.cols() != utterances[0].features.cols())
      throw ValidationError("feature dim mismatch in utterance: " + u.id);
  }
}

void ReferenceTranscript::Validate() const {
  for (const auto &[utt, toks] : tokens) {
    int prev_end = 0;
    for (const auto &t : toks) {
      if (t.start_frame < 0 || t.end_frame <= t.start_frame)
        throw ValidationError("bad token span in utterance " + utt);
      if (t.start_frame < prev_end)
        throw ValidationError("overlapping tokens in utterance " + utt);
      prev_end = t.end_frame;
    }
  }
}

void DocumentSet::Validate(const FeatureSet *fs) const {
  std::set<std::string> ids;
  for (const auto &d : documents) {
    if (!ids.insert(d.doc_id).second)
      throw ValidationError("duplicate doc id: " + d.doc_id);
    if (fs != nullptr) {
      for (const auto &u : d.utterance_ids)
        if (fs->Find(u) == nullptr)
          throw ValidationError("document " + d.doc_id +
                                " references unknown utterance " + u);
    }
  }
}

FeatureSet ReadFeatureArchive(const std::string &path) {
  BinaryReader r(path);
  char magic[4];
  r.Raw(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(path + ": bad magic at byte offset 0 (not a FEAT1 archive)");
  const std::uint32_t version = r.U32("version");
  if (version != kFeatVersion)
    throw IoError(path + ": unsupported FEAT1 version " + std::to_string(version));
  const std::uint32_t count = r.U32("utterance count");

  FeatureSet fs;
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t header_off = r.offset();
    const std::uint32_t id_len = r.U32("id length");
    std::string id(id_len, '\0');
    r.Raw(id.data(), id_len, "utterance id");
    const std::uint32_t frames = r.U32("frame count");
    const std::uint32_t dim = r.U32("dim");
    if (!seen.insert(id).second)
      throw IoError(path + ": duplicate utterance id '" + id +
                    "' at byte offset " + std::to_string(header_off));
    if (!fs.utterances.empty() &&
        dim != static_cast<std::uint32_t>(fs.utterances[0].features.cols()))
      throw IoError(path + ": dim mismatch (" + std::to_string(dim) + " vs " +
                    std::to_string(fs.utterances[0].features.cols()) +
                    ") at byte offset " + std::to_string(header_off));
    std::vector<float> buf(static_cast<std::size_t>(frames) * dim);
    r.Raw(buf.data(), buf.size() * sizeof(float), "feature payload");
    Eigen::MatrixXd m(frames, dim);
    for (std::uint32_t t = 0; t < frames; ++t)
      for (std::uint32_t d = 0; d < dim; ++d)
        m(t, d) = static_cast<double>(buf[static_cast<std::size_t>(t) * dim + d]);
    fs.utterances.push_back({std::move(id), std::move(m)});
  }
  return fs;
}

void WriteFeatureArchive(const std::string &path, const FeatureSet &fs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write feature archive: " + path);
  out.write(kMagic, 4);
  PutU32(out, kFeatVersion);
  PutU32(out, static_cast<std::uint32_t>(fs.utterances.size()));
  for (const auto &u : fs.utterances) {
    PutU32(out, static_cast<std::uint32_t>(u.id.size()));
    out.write(u.id.data(), static_cast<std::streamsize>(u.id.size()));
    const auto frames = static_cast<std::uint32_t>(u.features.rows());
    const auto dim = static_cast<std::uint32_t>(u.features.cols());
    PutU32(out, frames);
    PutU32(out, dim);
    std::vector<float> buf(static_cast<std::size_t>(frames) * dim);
    for (std::uint32_t t = 0; t < frames; ++t)
      for (std::uint32_t d = 0; d < dim; ++d)
        buf[static_cast<std::size_t>(t) * dim + d] =
            static_cast<float>(u.features(t, d));
    out.write(reinterpret_cast<const char *>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) throw IoError("write failed: " + path);
}

ReferenceTranscript ReadTranscript(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open transcript: " + path);
  ReferenceTranscript ref;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = SplitTabs(line);
    if (f.size() != 4)
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected 4 tab-separated fields");
    RefToken tok{f[3], ParseInt(f[1], path, lineno), ParseInt(f[2], path, lineno)};
    ref.tokens[f[0]].push_back(std::move(tok));
  }
  ref.Validate();
  return ref;
}

void WriteTranscript(const std::string &path, const ReferenceTranscript &ref) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write transcript: " + path);
  for (const auto &[utt, toks] : ref.tokens)
    for (const auto &t : toks)
      out << utt << '\t' << t.start_frame << '\t' << t.end_frame << '\t'
          << t.label << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<WordSegment> ReadWordSegments(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open segment file: " + path);
  std::vector<WordSegment> segments;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = SplitTabs(line);
    if (f.size() != 4)
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected 4 tab-separated fields");
    segments.push_back(
        {f[0], ParseInt(f[1], path, lineno), ParseInt(f[2], path, lineno), f[3]});
  }
  return segments;
}

void WriteWordSegments(const std::string &path,
                       const std::vector<WordSegment> &segments) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write segment file: " + path);
  for (const auto &s : segments)
    out << s.utterance_id << '\t' << s.start_frame << '\t' << s.end_frame
        << '\t' << s.word_type << '\n';
  if (!out) throw IoError("write failed: " + path);
}

DocumentSet ReadDocuments(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open document file: " + path);
  DocumentSet docs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = SplitTabs(line);
    if (f.size() != 3)
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected 3 tab-separated fields");
    Document d;
    d.doc_id = f[0];
    d.topic = (f[1] == "-") ? std::string() : f[1];
    std::stringstream ss(f[2]);
    std::string utt;
    while (std::getline(ss, utt, ','))
      if (!utt.empty()) d.utterance_ids.push_back(utt);
    docs.documents.push_back(std::move(d));
  }
  docs.Validate();
  return docs;
}

void WriteDocuments(const std::string &path, const DocumentSet &docs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write document file: " + path);
  for (const auto &d : docs.documents) {
    out << d.doc_id << '\t' << (d.topic.empty() ? "-" : d.topic) << '\t';
    for (std::size_t i = 0; i < d.utterance_ids.size(); ++i)
      out << (i ? "," : "") << d.utterance_ids[i];
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::map<std::string, std::string> ReadSideMap(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open side map: " + path);
  std::map<std::string, std::string> sides;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = SplitTabs(line);
    if (f.size() != 2)
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected 2 tab-separated fields");
    sides[f[0]] = f[1];
  }
  return sides;
}

void WriteSideMap(const std::string &path,
                  const std::map<std::string, std::string> &sides) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write side map: " + path);
  for (const auto &[utt, side] : sides) out << utt << '\t' << side << '\n';
  if (!out) throw IoError("write failed: " + path);
}

FeatureSet ApplyCmvn(const FeatureSet &fs, std::vector<std::string> *warnings) {
  fs.Validate();
  const int dim = fs.Dim();

  // First pass: per-side sums.
  struct SideStats {
    Eigen::VectorXd sum, sumsq;
    std::size_t frames = 0;
  };
  std::map<std::string, SideStats> stats;
  for (const auto &u : fs.utterances) {
    auto &s = stats[fs.SideOf(u.id)];
    if (s.frames == 0) {
      s.sum = Eigen::VectorXd::Zero(dim);
      s.sumsq = Eigen::VectorXd::Zero(dim);
    }
    s.sum += u.features.colwise().sum().transpose();
    s.sumsq += u.features.array().square().colwise().sum().matrix().transpose();
    s.frames += static_cast<std::size_t>(u.features.rows());
  }
  for (const auto &[side, s] : stats)
    if (s.frames < 2)
      throw ValidationError("CMVN side group '" + side +
                            "' has fewer than 2 frames");

  std::map<std::string, std::pair<Eigen::VectorXd, Eigen::VectorXd>> norm;
  for (auto &[side, s] : stats) {
    const double n = static_cast<double>(s.frames);
    Eigen::VectorXd mean = s.sum / n;
    Eigen::VectorXd var =
        (s.sumsq / n - mean.array().square().matrix()).cwiseMax(0.0);
    Eigen::VectorXd inv_std(dim);
    for (int d = 0; d < dim; ++d) {
      if (var(d) < kVarianceFloor) {
        // A constant dimension ends up mean-shifted only; the clamped
        // divisor never rescales the resulting zeros.
        if (warnings != nullptr)
          warnings->push_back("CMVN: side '" + side + "' dimension " +
                              std::to_string(d) +
                              " has near-zero variance; divisor clamped");
        inv_std(d) = 1.0 / std::sqrt(kVarianceFloor);
      } else {
        inv_std(d) = 1.0 / std::sqrt(var(d));
      }
    }
    norm[side] = {std::move(mean), std::move(inv_std)};
  }

  FeatureSet out = fs;
  for (auto &u : out.utterances) {
    const auto &[mean, inv_std] = norm.at(fs.SideOf(u.id));
    u.features = ((u.features.rowwise() - mean.transpose()).array().rowwise() *
                  inv_std.transpose().array())
                     .matrix();
  }
  return out;
}

Eigen::MatrixXd SpliceFrames(const Eigen::MatrixXd &features, int context) {
  if (context < 0) throw ValidationError("splice context must be >= 0");
  const Eigen::Index n = features.rows(), dim = features.cols();
  const int width = 2 * context + 1;
  Eigen::MatrixXd out(n, dim * width);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (int c = -context; c <= context; ++c) {
      Eigen::Index src = std::clamp<Eigen::Index>(t + c, 0, n - 1);
      out.block(t, static_cast<Eigen::Index>(c + context) * dim, 1, dim) =
          features.row(src);
    }
  }
  return out;
}

FeatureSet SpliceFeatures(const FeatureSet &fs, int context) {
  FeatureSet out = fs;
  for (auto &u : out.utterances) u.features = SpliceFrames(u.features, context);
  return out;
}

}  // namespace aud
