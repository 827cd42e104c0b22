#pragma once

#include <stdexcept>
#include <string>

namespace treeclust {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- tree construction / queries ---
class NotLaminarError : public Error { public: using Error::Error; };
class NotBinaryError : public Error { public: using Error::Error; };
class MissingRootOrLeafError : public Error { public: using Error::Error; };
class UnknownClusterError : public Error { public: using Error::Error; };
class NotAGrandchildError : public Error { public: using Error::Error; };
class IndexSetMismatchError : public Error { public: using Error::Error; };
class IndexSetTooSmallError : public Error { public: using Error::Error; };
class IndexSetTooLargeError : public Error { public: using Error::Error; };

// --- datasets and statistics ---
class UnknownLabelError : public Error { public: using Error::Error; };
class ZeroNormVectorError : public Error { public: using Error::Error; };
class DimensionMismatchError : public Error { public: using Error::Error; };
class DuplicateLabelError : public Error { public: using Error::Error; };
class EmptyDatasetError : public Error { public: using Error::Error; };

// --- linkages ---
class OverlappingClustersError : public Error { public: using Error::Error; };
class StrategyUnavailableError : public Error { public: using Error::Error; };
class UnsupportedKindError : public Error { public: using Error::Error; };
class UnsupportedDissimilarityError : public Error { public: using Error::Error; };

// --- anytime loop ---
class IterationBudgetExceededError : public Error { public: using Error::Error; };

// --- validation ---
class DegenerateVarianceError : public Error { public: using Error::Error; };

// --- file I/O ---
class ParseError : public Error { public: using Error::Error; };
class BadMagicError : public Error { public: using Error::Error; };
class TruncatedFileError : public Error { public: using Error::Error; };
class InsufficientSamplesError : public Error { public: using Error::Error; };

// --- configuration ---
class ConfigError : public Error { public: using Error::Error; };

} // namespace treeclust
