# Identification pipeline stages