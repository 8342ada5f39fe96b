"""IRIs shared by query models, catalogs, and knowledge bases."""

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

SOAS = "urn:soas:"

REQUEST_CLASS = SOAS + "Request"
ACTION = SOAS + "action"
TARGET = SOAS + "target"
ATTRIBUTE = SOAS + "attribute"
LOCATION = SOAS + "location"
NEAR_LOCATION = SOAS + "nearLocation"
FEATURE = SOAS + "feature"
TOPIC = SOAS + "topic"

SERVES_DOMAIN = SOAS + "servesDomain"
ENDPOINT = SOAS + "endpoint"
TITLE = SOAS + "title"

REQUEST_PREFIX = SOAS + "request:"
