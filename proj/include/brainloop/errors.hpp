#pragma once

#include <stdexcept>
#include <string>

namespace brainloop {

// Base of every error the library throws. Callers that only care about
// "something in the control stack rejected this" can catch Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class BehindCamera : public DomainError {
 public:
  BehindCamera() : DomainError("point is behind the camera (z <= 0)") {}
};

class DepthUnavailable : public Error {
 public:
  using Error::Error;
};

class OrderingError : public Error {
 public:
  using Error::Error;
};

// Decision text could not be turned into a Decision.
class ParseError : public Error {
 public:
  using Error::Error;
};

class NoDecisionBlock : public ParseError {
 public:
  NoDecisionBlock() : ParseError("no <decision> block found") {}
};

class MalformedPoint : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnknownSkill : public ParseError {
 public:
  explicit UnknownSkill(std::string name)
      : ParseError("unknown skill: " + name), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class BrainUnavailable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace brainloop
