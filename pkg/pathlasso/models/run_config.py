from dataclasses import dataclass, field
import json

# Keys that change where or how fast a run happens but never its results.
RUNTIME_KEYS = ('output_dir', 'threads')


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one CLI invocation: defaults <- JSON file <- flags."""

    command: str
    params: dict = field(default_factory=dict)

    @classmethod
    def resolve(cls, command, defaults, flags, config_file=None):
        """
        Merge configuration sources.

        Args:
            command: Subcommand name
            defaults: Every accepted key with its default value
            flags: Values given explicitly on the command line
            config_file: Optional path to a JSON object of overrides

        Returns:
            RunConfig: Merged configuration

        Raises:
            ValueError: If the file holds unknown keys or is not a JSON object
            OSError: If the file cannot be read
        """
        params = dict(defaults)
        if config_file:
            with open(config_file, encoding='utf-8') as handle:
                file_values = json.load(handle)
            if not isinstance(file_values, dict):
                raise ValueError('config file must hold a JSON object')
            file_values = file_values.get('params', file_values)
            unknown = sorted(set(file_values) - set(defaults))
            if unknown:
                raise ValueError(f'Unknown config keys for {command}: {", ".join(unknown)}')
            params.update(file_values)
        params.update({key: value for key, value in flags.items() if value is not None})
        return cls(command=command, params=params)

    def __getitem__(self, key):
        return self.params[key]

    def get(self, key, default=None):
        return self.params.get(key, default)

    def to_dict(self):
        return {'command': self.command, 'params': dict(sorted(self.params.items()))}

    def provenance(self):
        """to_dict without RUNTIME_KEYS, so the record is identical across thread counts."""
        params = {key: value for key, value in self.params.items() if key not in RUNTIME_KEYS}
        return {'command': self.command, 'params': dict(sorted(params.items()))}
