#pragma once

#include <stdexcept>
#include <string>

namespace metaforests {

// Error categories map onto CLI exit codes: ConfigError -> 2,
// DataError -> 3, ModelError -> 4, anything else -> 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct ModelError : Error {
    using Error::Error;
};

// --- data ingestion ---
struct MissingColumn : DataError {
    using DataError::DataError;
};
struct DuplicateHeader : DataError {
    using DataError::DataError;
};
struct NonNumericFeature : DataError {
    using DataError::DataError;
};
struct EmptyDomain : DataError {
    using DataError::DataError;
};
struct CsvFormatError : DataError {
    using DataError::DataError;
};
struct InvalidSchema : DataError {
    using DataError::DataError;
};
struct UnknownDomain : DataError {
    using DataError::DataError;
};
struct TooFewDomains : DataError {
    using DataError::DataError;
};
struct IoError : DataError {
    using DataError::DataError;
};

// --- configuration ---
struct InvalidRatio : ConfigError {
    using ConfigError::ConfigError;
};
struct InvalidSpec : ConfigError {
    using ConfigError::ConfigError;
};
struct InvalidConfig : ConfigError {
    using ConfigError::ConfigError;
};
struct NonPositiveBandwidth : ConfigError {
    using ConfigError::ConfigError;
};

// --- numeric / state ---
struct EmptyHistogram : DataError {
    using DataError::DataError;
};
struct EmptyFeaturePool : DataError {
    using DataError::DataError;
};
struct EmptySet : DataError {
    using DataError::DataError;
};
struct LengthMismatch : DataError {
    using DataError::DataError;
};
struct NonPositiveWeight : Error {
    using Error::Error;
};
struct EmptyWeights : Error {
    using Error::Error;
};

// --- model files & prediction ---
struct DimensionMismatch : ModelError {
    using ModelError::ModelError;
};
struct VersionMismatch : ModelError {
    using ModelError::ModelError;
};
struct CorruptFile : ModelError {
    using ModelError::ModelError;
};

}  // namespace metaforests
