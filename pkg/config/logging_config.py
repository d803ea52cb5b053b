import logging
import sys
import os


def configure_logging(mode='normal', log_file=None):
    """
    Configure logging based on the specified mode.

    Args:
        mode (str): Logging mode - 'normal', 'quiet', 'debug', or 'clean_output'
                   - normal: INFO level to stderr
                   - quiet: ERROR level to stderr
                   - debug: DEBUG level to stderr
                   - clean_output: ERROR level to stderr, results alone on stdout
        log_file (str): Path of the log file; defaults to LQCA_LOG_FILE or lqca.log.
                   The file always receives INFO and above.
    """
    log_file = log_file or os.environ.get('LQCA_LOG_FILE', 'lqca.log')
    formatter = logging.Formatter('%(asctime)s %(levelname)s %(name)s - %(message)s')

    file_handler = logging.FileHandler(log_file)
    file_handler.setLevel(logging.INFO)
    file_handler.setFormatter(formatter)

    # stdout carries experiment results, so console logs go to stderr
    console_handler = logging.StreamHandler(stream=sys.stderr)
    if mode == 'debug':
        console_level = logging.DEBUG
    elif mode in ('quiet', 'clean_output'):
        console_level = logging.ERROR
    else:
        console_level = logging.INFO
    console_handler.setLevel(console_level)
    console_handler.setFormatter(formatter)

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()

    root_logger.addHandler(file_handler)
    root_logger.addHandler(console_handler)


# Default configuration - can be overridden by calling configure_logging()
configure_logging(os.environ.get('LQCA_LOG_MODE', os.environ.get('LOG_MODE', 'normal')))
