#pragma once

#include <stdexcept>
#include <string>

namespace mrr {

// Base for all domain errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MRR_DEFINE_ERROR(Name)           \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

MRR_DEFINE_ERROR(DegenerateCorrespondences);
MRR_DEFINE_ERROR(InvalidSample);
MRR_DEFINE_ERROR(TrackingLost);
MRR_DEFINE_ERROR(ConfigError);
MRR_DEFINE_ERROR(MalformedMessage);
MRR_DEFINE_ERROR(UnsupportedVersion);
MRR_DEFINE_ERROR(UnauthorizedMessageKind);
MRR_DEFINE_ERROR(SessionClosed);
MRR_DEFINE_ERROR(StorageFailure);
MRR_DEFINE_ERROR(InsufficientData);
MRR_DEFINE_ERROR(MissingItem);
MRR_DEFINE_ERROR(NoData);

// Structural JSON decoding failure; the message names the field path.
MRR_DEFINE_ERROR(DecodeError);

#undef MRR_DEFINE_ERROR

}  // namespace mrr
