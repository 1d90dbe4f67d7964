#pragma once

#include <string>

// Fixed vocabulary IRIs. Parsers and the store compare these byte-exact
// after prefix expansion.

namespace semweave::vocab {

inline const std::string kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline const std::string kRdfProperty = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";

inline const std::string kRdfsSubClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline const std::string kRdfsSubPropertyOf = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
inline const std::string kRdfsDomain = "http://www.w3.org/2000/01/rdf-schema#domain";
inline const std::string kRdfsRange = "http://www.w3.org/2000/01/rdf-schema#range";
inline const std::string kRdfsClass = "http://www.w3.org/2000/01/rdf-schema#Class";
inline const std::string kRdfsDatatype = "http://www.w3.org/2000/01/rdf-schema#Datatype";

inline const std::string kXsdNs = "http://www.w3.org/2001/XMLSchema#";
inline const std::string kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline const std::string kXsdDouble = "http://www.w3.org/2001/XMLSchema#double";
inline const std::string kXsdFloat = "http://www.w3.org/2001/XMLSchema#float";
inline const std::string kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline const std::string kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline const std::string kXsdInt = "http://www.w3.org/2001/XMLSchema#int";
inline const std::string kXsdLong = "http://www.w3.org/2001/XMLSchema#long";
inline const std::string kXsdBoolean = "http://www.w3.org/2001/XMLSchema#boolean";
inline const std::string kXsdDateTime = "http://www.w3.org/2001/XMLSchema#dateTime";
inline const std::string kXsdAnyUri = "http://www.w3.org/2001/XMLSchema#anyURI";

// True for datatype IRIs this engine knows how to lexically check.
inline bool known_datatype(const std::string& iri) {
    return iri.rfind(kXsdNs, 0) == 0;
}

}  // namespace semweave::vocab
