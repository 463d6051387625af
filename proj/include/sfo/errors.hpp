#pragma once

#include <stdexcept>
#include <string>

namespace sfo {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mesh construction.
class NonManifoldEdge : public Error { public: using Error::Error; };
class DegenerateFace : public Error { public: using Error::Error; };
class IndexOutOfRange : public Error { public: using Error::Error; };
class UnreferencedVertex : public Error { public: using Error::Error; };

// Metric and operator construction.
class ZeroLengthEdge : public Error { public: using Error::Error; };
class InvalidTriangle : public Error { public: using Error::Error; };
class DegenerateTriangle : public Error { public: using Error::Error; };
class InvalidMetric : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class EigensolverFailure : public Error { public: using Error::Error; };
class DisconnectedMesh : public Error { public: using Error::Error; };
class ShapeMismatch : public Error { public: using Error::Error; };

// Solvers.
class InvalidInitialMetric : public Error { public: using Error::Error; };

// I/O.
class ParseError : public Error { public: using Error::Error; };
class NonTriangleFace : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class MissingEdge : public Error { public: using Error::Error; };
class UnknownEdge : public Error { public: using Error::Error; };
class NonPositiveLength : public Error { public: using Error::Error; };

// Violated call preconditions that do not fit a more specific category.
class InvalidArgument : public Error { public: using Error::Error; };

}  // namespace sfo
