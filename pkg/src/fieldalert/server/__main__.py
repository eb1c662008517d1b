"""Server entry point: load config, recover state from the log, listen."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..geo import load_region_file
from ..routing import load_directory_file
from .config import ServerConfig, load_config
from .core import AlertServer
from .http import make_http_server

log = logging.getLogger("fieldalert.server")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fieldalert-server",
        description="Disaster report intake, routing, and push distribution.")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--regions", help="region file path (overrides config)")
    parser.add_argument("--directory", help="actor directory path (overrides config)")
    parser.add_argument("--log", help="audit log path (overrides config)")
    parser.add_argument("--host", help="listen host (overrides config)")
    parser.add_argument("--port", type=int, help="listen port (overrides config)")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO,
                        format="%(asctime)s %(name)s %(message)s")

    config = load_config(args.config) if args.config else ServerConfig()
    if args.regions:
        config.region_file = args.regions
    if args.directory:
        config.directory_file = args.directory
    if args.log:
        config.log_path = args.log
    if args.host:
        config.listen_host = args.host
    if args.port is not None:
        config.listen_port = args.port

    if not config.region_file or not config.directory_file:
        parser.error("a region file and an actor directory are required "
                     "(--regions/--directory or config)")

    hierarchy = load_region_file(config.region_file)
    directory = load_directory_file(config.directory_file)

    log_path = config.log_path
    if log_path and Path(log_path).exists():
        server = AlertServer.replay_file(log_path, hierarchy, directory, config)
        server.bind_log(log_path)
        log.info("recovered %d reports from %s", server.report_count(), log_path)
    else:
        server = AlertServer(hierarchy, directory, config,
                             log_path=log_path or None)

    httpd = make_http_server(server, config.listen_host, config.listen_port)
    host, port = httpd.server_address[:2]
    log.info("listening on %s:%d", host, port)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        log.info("shutting down")
    finally:
        httpd.server_close()
        server.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
