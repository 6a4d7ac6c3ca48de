// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace patchrnn {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedPatch : public Error {
 public:
  using Error::Error;
};

class HunkCountMismatch : public Error {
 public:
  HunkCountMismatch(std::string file, std::size_t hunk_index,
                    const std::string& detail)
      : Error("hunk count mismatch in '" + file + "' hunk #" +
              std::to_string(hunk_index) + ": " + detail),
        file_(std::move(file)),
        hunk_index_(hunk_index) {}

  const std::string& file() const { return file_; }
  std::size_t hunk_index() const { return hunk_index_; }

 private:
  std::string file_;
  std::size_t hunk_index_;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus is empty") {}
};

/// Invalid configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A forward or backward pass produced NaN or Inf.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("dataset is empty") {}
};

class SingleClassDataset : public Error {
 public:
  SingleClassDataset()
      : Error("dataset needs at least one sample of each class") {}
};

class MissingRoot : public Error {
 public:
  explicit MissingRoot(const std::string& path)
      : Error("dataset root does not exist: " + path) {}
};

class AllSamplesFailed : public Error {
 public:
  using Error::Error;
};

class EmptyMatrix : public Error {
 public:
  EmptyMatrix() : Error("confusion matrix is empty") {}
};

}  // namespace patchrnn
